use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Conjecture, ConjectureReport, Verdict};
use crate::bmsheaf::BMSheaf;
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::gradedlin::{
    first_intersection, graded_torsion_decomposition, specialize_to_line, Ambient, Generators,
    PolyMap, TorsionDecomposition,
};
use crate::hecke::HeckeAlgebra;

fn report(sheaf: &BMSheaf, c: Conjecture, y: usize) -> ConjectureReport {
    let ball = sheaf.ball();
    ConjectureReport::new(
        c,
        Some(ball.format(sheaf.x())),
        Some(ball.format(sheaf.graph().vertices[y])),
    )
}

/// Stalk generators below the gap, checked in both the stalk form and the
/// dual defect form; one report per vertex `y < x`.
pub fn check_dcon(sheaf: &BMSheaf) -> Result<Vec<ConjectureReport>> {
    let n = sheaf.graph().len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for y in 0..n - 1 {
        let gap = sheaf.gap(y);
        let stalk_bad = sheaf.stalk(y).degrees().iter().copied().find(|&g| g > gap - 1);
        let defect_bad = sheaf.defect(y).degrees.degrees().iter().copied().find(|&g| g < gap + 1);
        if stalk_bad.is_some() != defect_bad.is_some() {
            return Err(Error::Internal(format!(
                "degree bound disagrees between stalk {:?} and defect {:?} at vertex {y}",
                sheaf.stalk(y),
                sheaf.defect(y).degrees
            )));
        }
        let witness = stalk_bad.zip(defect_bad).map(|(s, d)| {
            json!({"stalk_degree": s, "stalk_bound": gap - 1, "defect_degree": d, "defect_bound": gap + 1})
        });
        out.push(
            report(sheaf, Conjecture::Dcon, y)
                .param("gap", gap)
                .finish(Verdict::from_bool(witness.is_none()), witness),
        );
    }
    Ok(out)
}

/// Exact equality of the graded character with `C'_x`.
pub fn check_klcon(sheaf: &BMSheaf, algebra: &HeckeAlgebra) -> Result<ConjectureReport> {
    let ball = sheaf.ball();
    if !std::sync::Arc::ptr_eq(algebra.ball(), ball) {
        return Err(Error::Validation("Hecke algebra and sheaf use different balls".into()));
    }
    let x = sheaf.x();
    let character = sheaf.graded_character();
    let kl = algebra.kl_basis(x)?.to_element();
    let mut support: Vec<_> = character.support().chain(kl.support()).collect();
    support.sort();
    support.dedup();
    let witness = support.into_iter().find_map(|y| {
        let (a, b) = (character.coefficient(y), kl.coefficient(y));
        (a != b).then(|| json!({"y": ball.format(y), "character": a.to_string(), "kl": b.to_string()}))
    });
    Ok(ConjectureReport::new(Conjecture::Klcon, Some(ball.format(x)), None)
        .finish(Verdict::from_bool(witness.is_none()), witness))
}

/// `e_j` in degree `g_j` of a free ambient.
fn generator_vector(ambient: &Ambient, j: usize) -> (i32, crate::linalg::SparseVec) {
    let g = ambient.blocks()[j].degree;
    let offset = ambient.layout(g).offsets[j];
    (g, vec![(offset as u32, FieldElement::one())])
}

/// Whether the defect submodule truncated at `L + m - 1` meets the stalk
/// truncated at `L - m`, with `L = l(x) - l(y)`, in any degree up to `cap`.
pub fn check_pcon(sheaf: &BMSheaf, y: usize, m: u32, cap: i32) -> Result<ConjectureReport> {
    let gap = sheaf.gap(y);
    let m = m as i32;
    let stalk = Ambient::free(sheaf.rank(), sheaf.stalk(y));
    let inclusion: &PolyMap = &sheaf.defect(y).inclusion;
    let source = inclusion.source_ambient();
    let defect_gens = Generators {
        vectors: (0..source.blocks().len())
            .filter(|&j| source.blocks()[j].degree < gap + m)
            .map(|j| {
                let (g, e) = generator_vector(&source, j);
                (g, inclusion.apply(g, &e))
            })
            .collect(),
    };
    let stalk_gens = Generators {
        vectors: (0..stalk.blocks().len())
            .filter(|&i| stalk.blocks()[i].degree <= gap - m)
            .map(|i| generator_vector(&stalk, i))
            .collect(),
    };
    let hit = first_intersection(&stalk, &defect_gens, &stalk_gens, cap);
    let witness = hit.map(|(d, dim)| json!({"degree": d, "intersection_dim": dim}));
    let verdict = if hit.is_some() { Verdict::Fails } else { Verdict::HoldsUpToCap };
    Ok(report(sheaf, Conjecture::Pcon, y)
        .param("m", m)
        .param("cap", cap)
        .finish(verdict, witness))
}

/// [`check_pcon`] for `m = 1..=L+1`; larger `m` empty the stalk truncation.
pub fn check_pcon_all(sheaf: &BMSheaf, y: usize, cap: i32) -> Result<Vec<ConjectureReport>> {
    let top = (sheaf.gap(y) + 1).max(1) as u32;
    (1..=top).map(|m| check_pcon(sheaf, y, m, cap)).collect()
}

/// Where to centre the Hard Lefschetz symmetry of `coker(defect_T -> stalk_T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterConvention {
    /// `l(x) - l(y)`.
    Literal,
    /// `l(x) - l(y) - 1`, the default.
    Shifted,
}

impl CenterConvention {
    pub const ALL: [CenterConvention; 2] = [CenterConvention::Literal, CenterConvention::Shifted];

    pub fn center(self, gap: i32) -> i32 {
        match self {
            CenterConvention::Literal => gap,
            CenterConvention::Shifted => gap - 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CenterConvention::Literal => "literal",
            CenterConvention::Shifted => "shifted",
        }
    }
}

/// Torsion shape and Hard Lefschetz verdicts for one pair and one line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LefschetzSurvey {
    pub seed: u64,
    pub point: Vec<String>,
    pub decomposition: TorsionDecomposition,
    /// A `pdimone` and an `hl` report per requested convention.
    pub reports: Vec<ConjectureReport>,
}

impl LefschetzSurvey {
    pub fn verdict(&self, c: Conjecture, convention: CenterConvention) -> Option<Verdict> {
        self.reports
            .iter()
            .find(|r| r.conjecture == c && r.params.get("convention") == Some(&json!(convention.name())))
            .map(|r| r.verdict)
    }
}

/// Specializes the defect inclusion at `y` to a seeded line, decomposes the
/// cokernel and evaluates both conjectures at each requested centre. The
/// matrix-level Hard Lefschetz test is cross-checked against the
/// combinatorial one from the decomposition.
pub fn check_pdimone_hl(
    sheaf: &BMSheaf,
    y: usize,
    seed: u64,
    conventions: &[CenterConvention],
) -> Result<LefschetzSurvey> {
    let labels = sheaf.graph().labels();
    let line = specialize_to_line(sheaf.rank(), &labels, seed);
    let matrix = line.specialize(&sheaf.defect(y).inclusion)?;
    let decomposition = graded_torsion_decomposition(&matrix)?;
    let point: Vec<String> = line.point.iter().map(ToString::to_string).collect();
    let gap = sheaf.gap(y);
    let (lo, hi) = matrix.degree_range();

    let mut reports = Vec::new();
    for &conv in conventions {
        let c = conv.center(gap);
        let (hl_comb, shape) = shift_lemma_check(&decomposition, c)?;
        let bound = (hi - c).max(c - lo).max(1);
        let failing_m = (1..=bound).find(|&m| !matrix.lefschetz_bijective(c, m));
        if failing_m.is_none() != hl_comb {
            return Err(Error::Internal(format!(
                "Lefschetz test on the matrix disagrees with the decomposition {:?} at centre {c}",
                decomposition.summands
            )));
        }
        let base = |k| {
            report(sheaf, k, y)
                .param("center", c)
                .param("convention", conv.name())
                .param("line_seed", seed)
                .param("line", point.clone())
        };
        let shape_witness = decomposition
            .summands
            .iter()
            .find(|(g, n)| *g != c - *n as i32)
            .map(|(g, n)| json!({"gen_degree": g, "length": n + 1, "expected_gen_degree": c - *n as i32}));
        reports.push(base(Conjecture::Pdimone).finish(Verdict::from_bool(shape), shape_witness));
        let hl_witness = failing_m.map(|m| {
            json!({"m": m, "dim_low": matrix.cokernel_dim(c - m), "dim_high": matrix.cokernel_dim(c + m)})
        });
        reports.push(base(Conjecture::Hl).finish(Verdict::from_bool(hl_comb), hl_witness));
    }
    Ok(LefschetzSurvey {
        seed,
        point,
        decomposition,
        reports,
    })
}

/// Hard Lefschetz about `center`, read off the Hilbert data, and the shift
/// pattern `g_i = center - n_i`. The two must coincide; a disagreement is
/// reported as an internal error.
pub fn shift_lemma_check(decomp: &TorsionDecomposition, center: i32) -> Result<(bool, bool)> {
    let shape = decomp.summands.iter().all(|&(g, n)| g == center - n as i32);
    let (Some(lo), Some(hi)) = (decomp.bottom_degree(), decomp.top_degree()) else {
        return if shape { Ok((true, true)) } else { Err(Error::Internal("empty decomposition".into())) };
    };
    let bound = (hi - center).max(center - lo).max(1);
    let hl = (1..=bound).all(|m| {
        let (a, b) = (center - m, center + m);
        // T^m is injective on a cyclic summand exactly when both ends lie in it.
        let injective = decomp.summands.iter().all(|&(g, n)| {
            let inside = |d: i32| d >= g && d <= g + 2 * n as i32 && (d - g) % 2 == 0;
            !inside(a) || inside(b)
        });
        injective && decomp.hilbert(a) == decomp.hilbert(b)
    });
    if hl != shape {
        return Err(Error::Internal(format!(
            "Lefschetz and shift pattern disagree on {:?} at centre {center}",
            decomp.summands
        )));
    }
    Ok((hl, shape))
}
