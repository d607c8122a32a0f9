//! JSON forms of sheaves and Kazhdan–Lusztig tables, and an on-disk sheaf
//! cache keyed by content hash.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use malachite_q::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bmsheaf::{build_bm, BMSheaf, CapFlag, Defect};
use crate::coxeter::{Ball, CoxeterSystem, ElementId};
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, FieldSpec};
use crate::gradedlin::{Ambient, GradedMultiset, Monomial, Poly, PolyMap};
use crate::hecke::HeckeAlgebra;

/// Bumped whenever the serialized layout or the construction changes.
pub const SCHEMA_VERSION: u32 = 1;

/// A field element as its power-basis coordinates, written as rationals.
pub type CoeffJson = Vec<String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u8>,
    pub coeff: CoeffJson,
}

pub type PolyJson = Vec<TermJson>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub source: GradedMultiset,
    /// `[target block][source generator]`.
    pub entries: Vec<Vec<PolyJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub lower: String,
    pub upper: String,
    pub label: Vec<CoeffJson>,
    pub rho: MapJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub y: String,
    pub length: usize,
    pub stalk: GradedMultiset,
    pub defect: GradedMultiset,
    pub defect_inclusion: MapJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafJson {
    pub schema: u32,
    pub generators: Vec<String>,
    pub matrix: Vec<Vec<u32>>,
    pub x: String,
    pub cap_margin: u32,
    /// In graph order: by length, apex last.
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub cap_report: Vec<CapFlag>,
}

fn coeff_to_json(c: &FieldElement, spec: &FieldSpec) -> Result<CoeffJson> {
    Ok(c.coeffs(spec)?.iter().map(ToString::to_string).collect())
}

fn coeff_from_json(c: &CoeffJson, spec: &Arc<FieldSpec>) -> Result<FieldElement> {
    let q = c
        .iter()
        .map(|s| Rational::from_str(s).map_err(|_| Error::Validation(format!("bad rational {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    FieldElement::from_coeffs(spec, q)
}

fn poly_to_json(p: &Poly, spec: &FieldSpec) -> Result<PolyJson> {
    p.terms()
        .map(|(m, c)| Ok(TermJson { exponents: m.0.clone(), coeff: coeff_to_json(c, spec)? }))
        .collect()
}

fn poly_from_json(p: &PolyJson, spec: &Arc<FieldSpec>) -> Result<Poly> {
    let mut out = Poly::zero();
    for t in p {
        out.add_term(Monomial(t.exponents.clone()), &coeff_from_json(&t.coeff, spec)?);
    }
    Ok(out)
}

fn map_to_json(m: &PolyMap, spec: &FieldSpec) -> Result<MapJson> {
    Ok(MapJson {
        source: m.source().clone(),
        entries: m
            .entries()
            .iter()
            .map(|row| row.iter().map(|p| poly_to_json(p, spec)).collect())
            .collect::<Result<_>>()?,
    })
}

fn map_from_json(m: &MapJson, target: Ambient, spec: &Arc<FieldSpec>) -> Result<PolyMap> {
    let entries = m
        .entries
        .iter()
        .map(|row| row.iter().map(|p| poly_from_json(p, spec)).collect())
        .collect::<Result<_>>()?;
    PolyMap::new(m.source.clone(), target, entries)
}

pub fn sheaf_to_json(sheaf: &BMSheaf) -> Result<SheafJson> {
    let ball = sheaf.ball();
    let sys = ball.system();
    let spec = sys.field();
    let g = sheaf.graph();
    let vertices = (0..g.len())
        .map(|y| {
            Ok(VertexJson {
                y: ball.format(g.vertices[y]),
                length: g.lengths[y],
                stalk: sheaf.stalk(y).clone(),
                defect: sheaf.defect(y).degrees.clone(),
                defect_inclusion: map_to_json(&sheaf.defect(y).inclusion, spec)?,
            })
        })
        .collect::<Result<_>>()?;
    let edges = g
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            Ok(EdgeJson {
                lower: ball.format(g.vertices[edge.lower]),
                upper: ball.format(g.vertices[edge.upper]),
                label: edge.label.coords().iter().map(|c| coeff_to_json(c, spec)).collect::<Result<_>>()?,
                rho: map_to_json(sheaf.rho(e), spec)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SheafJson {
        schema: SCHEMA_VERSION,
        generators: sys.generators().to_vec(),
        matrix: sys.coxeter_matrix().to_vec(),
        x: ball.format(sheaf.x()),
        cap_margin: sheaf.cap_margin(),
        vertices,
        edges,
        cap_report: sheaf.cap_report().to_vec(),
    })
}

/// Rebuilds a sheaf inside `ball`, which must belong to the same Coxeter
/// system and contain `x`.
pub fn sheaf_from_json(json: &SheafJson, ball: &Arc<Ball>) -> Result<BMSheaf> {
    if json.schema != SCHEMA_VERSION {
        return Err(Error::Validation(format!(
            "sheaf schema {} does not match {SCHEMA_VERSION}",
            json.schema
        )));
    }
    let sys = ball.system();
    if sys.coxeter_matrix() != json.matrix.as_slice() || sys.generators() != json.generators.as_slice() {
        return Err(Error::Validation("sheaf was computed for a different Coxeter system".into()));
    }
    let spec = sys.field();
    let r = sys.rank();
    let x = ball.parse(&json.x)?;
    let graph = crate::coxeter::interval_graph(ball, x)?;
    if json.vertices.len() != graph.len() || json.edges.len() != graph.edges.len() {
        return Err(Error::Validation("sheaf data does not match the interval".into()));
    }
    for (v, id) in json.vertices.iter().zip(&graph.vertices) {
        if ball.parse(&v.y)? != *id {
            return Err(Error::Validation(format!("vertex {} is out of order", v.y)));
        }
    }
    let stalks: Vec<GradedMultiset> = json.vertices.iter().map(|v| v.stalk.clone()).collect();
    let quotients: Vec<_> = graph
        .edges
        .iter()
        .map(|e| crate::gradedlin::LinearQuotient::new(e.label.clone()))
        .collect();
    let rho = json
        .edges
        .iter()
        .zip(&graph.edges)
        .zip(&quotients)
        .map(|((ej, edge), q)| {
            map_from_json(&ej.rho, Ambient::quotient(r, &stalks[edge.upper], Some(q)), spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let defects = json
        .vertices
        .iter()
        .map(|v| {
            let inclusion = map_from_json(&v.defect_inclusion, Ambient::free(r, &v.stalk), spec)?;
            if inclusion.source() != &v.defect {
                return Err(Error::Validation(format!("defect inclusion at {} has the wrong source", v.y)));
            }
            Ok(Defect { degrees: v.defect.clone(), inclusion })
        })
        .collect::<Result<Vec<_>>>()?;
    BMSheaf::from_parts(ball, x, json.cap_margin, stalks, rho, defects, json.cap_report.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlRow {
    pub y: String,
    pub length: usize,
    /// `h_{y,x}` in `v`.
    pub h: String,
    /// `P_{y,x}` coefficients, constant term first.
    pub p: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KlTable {
    pub x: String,
    pub rows: Vec<KlRow>,
}

/// `C'_x` as one row per `y <= x`, ordered by length then enumeration order.
pub fn kl_table(algebra: &HeckeAlgebra, x: ElementId) -> Result<KlTable> {
    let ball = algebra.ball();
    let kl = algebra.kl_basis(x)?;
    let mut ys = ball.lower_interval(x);
    ys.sort_by_key(|&y| (ball.length(y), y));
    Ok(KlTable {
        x: ball.format(x),
        rows: ys
            .into_iter()
            .map(|y| KlRow {
                y: ball.format(y),
                length: ball.length(y),
                h: kl.h(y).to_string(),
                p: kl.p(y).iter().map(ToString::to_string).collect(),
            })
            .collect(),
    })
}

/// How a cached sheaf was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    /// A file was present but failed its checksum or did not parse.
    Corrupt,
    /// A file was present with a different schema version.
    Stale,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: u32,
    checksum: String,
    sheaf: SheafJson,
}

fn checksum(sheaf: &SheafJson) -> Result<String> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(sheaf)?)))
}

/// Directory of serialized sheaves.
#[derive(Clone, Debug)]
pub struct SheafCache {
    dir: PathBuf,
}

impl SheafCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SheafCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash of the Coxeter matrix, apex word, cap margin and schema version.
    pub fn key(sys: &CoxeterSystem, word: &str, cap_margin: u32) -> String {
        let id = serde_json::json!({
            "generators": sys.generators(),
            "matrix": sys.coxeter_matrix(),
            "x": word,
            "cap_margin": cap_margin,
            "schema": SCHEMA_VERSION,
        });
        hex::encode(Sha256::digest(id.to_string().as_bytes()))
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn store(&self, sheaf: &BMSheaf) -> Result<PathBuf> {
        let json = sheaf_to_json(sheaf)?;
        let key = Self::key(sheaf.ball().system(), &json.x, sheaf.cap_margin());
        let env = Envelope { schema: SCHEMA_VERSION, checksum: checksum(&json)?, sheaf: json };
        let path = self.path(&key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(&env)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// The cached sheaf, or why there is none usable.
    pub fn load(&self, ball: &Arc<Ball>, x: ElementId, cap_margin: u32) -> Result<(Option<BMSheaf>, CacheStatus)> {
        let path = self.path(&Self::key(ball.system(), &ball.format(x), cap_margin));
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((None, CacheStatus::Miss)),
            Err(e) => return Err(e.into()),
        };
        let Ok(env) = serde_json::from_slice::<Envelope>(&bytes) else {
            return Ok((None, CacheStatus::Corrupt));
        };
        if env.schema != SCHEMA_VERSION || env.sheaf.schema != SCHEMA_VERSION {
            return Ok((None, CacheStatus::Stale));
        }
        if checksum(&env.sheaf)? != env.checksum {
            return Ok((None, CacheStatus::Corrupt));
        }
        match sheaf_from_json(&env.sheaf, ball) {
            Ok(s) => Ok((Some(s), CacheStatus::Hit)),
            Err(Error::Validation(_)) => Ok((None, CacheStatus::Corrupt)),
            Err(e) => Err(e),
        }
    }

    /// Loads `B(x)` if a valid copy is cached; otherwise builds and stores it.
    pub fn load_or_build(&self, ball: &Arc<Ball>, x: ElementId, cap_margin: u32) -> Result<(BMSheaf, CacheStatus)> {
        let (cached, status) = self.load(ball, x, cap_margin)?;
        if let Some(s) = cached {
            return Ok((s, status));
        }
        let sheaf = build_bm(ball, x, cap_margin)?;
        self.store(&sheaf)?;
        Ok((sheaf, status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmsheaf::DEFAULT_CAP_MARGIN;
    use crate::coxeter::enumerate_ball;

    fn ball(sys: Arc<CoxeterSystem>, len: usize) -> Arc<Ball> {
        Arc::new(enumerate_ball(&sys, len))
    }

    #[test]
    fn roundtrip_rational_and_cyclotomic() {
        for (sys, word) in [
            (CoxeterSystem::type_a(1), "s1"),
            (CoxeterSystem::type_a(2), "s1 s2 s1"),
            (CoxeterSystem::dihedral(5), "s1 s2 s1"),
        ] {
            let b = ball(sys, 3);
            let s = build_bm(&b, b.parse(word).unwrap(), DEFAULT_CAP_MARGIN).unwrap();
            let json = sheaf_to_json(&s).unwrap();
            let text = serde_json::to_string(&json).unwrap();
            let back: SheafJson = serde_json::from_str(&text).unwrap();
            assert_eq!(sheaf_from_json(&back, &b).unwrap(), s, "{word}");
        }
    }

    #[test]
    fn wrong_system_rejected() {
        let a2 = ball(CoxeterSystem::type_a(2), 3);
        let s = build_bm(&a2, a2.parse("s1 s2").unwrap(), 2).unwrap();
        let json = sheaf_to_json(&s).unwrap();
        let other = ball(CoxeterSystem::dihedral(4), 3);
        assert!(matches!(sheaf_from_json(&json, &other), Err(Error::Validation(_))));
    }

    #[test]
    fn cache_statuses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SheafCache::new(dir.path()).unwrap();
        let b = ball(CoxeterSystem::type_a(1), 1);
        let x = b.parse("s1").unwrap();
        let (s, st) = cache.load_or_build(&b, x, 4).unwrap();
        assert_eq!(st, CacheStatus::Miss);
        let (t, st) = cache.load_or_build(&b, x, 4).unwrap();
        assert_eq!(st, CacheStatus::Hit);
        assert_eq!(s, t);
        assert_eq!(cache.load(&b, x, 3).unwrap().1, CacheStatus::Miss);

        let path = cache.path(&SheafCache::key(b.system(), "s1", 4));
        let text = fs::read_to_string(&path).unwrap().replacen("\"stalk\":[0]", "\"stalk\":[2]", 1);
        fs::write(&path, text).unwrap();
        assert_eq!(cache.load(&b, x, 4).unwrap().1, CacheStatus::Corrupt);
        fs::write(&path, b"{not json").unwrap();
        let (u, st) = cache.load_or_build(&b, x, 4).unwrap();
        assert_eq!(st, CacheStatus::Corrupt);
        assert_eq!(u, s);

        let text = fs::read_to_string(&path).unwrap().replacen("\"schema\":1", "\"schema\":0", 1);
        fs::write(&path, text).unwrap();
        assert_eq!(cache.load(&b, x, 4).unwrap().1, CacheStatus::Stale);
    }

    #[test]
    fn kl_table_a2() {
        let alg = HeckeAlgebra::new(ball(CoxeterSystem::type_a(2), 3));
        let t = kl_table(&alg, alg.ball().parse("s1 s2 s1").unwrap()).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.rows[0].y, "e");
        assert_eq!(t.rows[0].h, "v^3");
        assert!(t.rows.iter().all(|r| r.p == ["1"]));
    }
}
