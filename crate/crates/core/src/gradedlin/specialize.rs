use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::module::{poly_degree, GradedMultiset};
use super::poly::Poly;
use super::polymap::PolyMap;
use crate::coxeter::Root;
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::linalg::{self, SparseVec};

/// A point `p` of `V*` defining `ρ: S -> k[T]`, `α ↦ α(p) T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub point: Vec<FieldElement>,
}

impl Line {
    pub fn new(point: Vec<FieldElement>) -> Self {
        Line { point }
    }

    /// Whether `ρ(α) != 0` for every given root.
    pub fn is_valid_for(&self, labels: &[Root]) -> bool {
        labels.iter().all(|a| !a.eval(&self.point).is_zero())
    }

    /// `c` with `ρ(f) = c T^{deg f}` for homogeneous `f`.
    pub fn eval(&self, f: &Poly) -> FieldElement {
        f.eval(&self.point)
    }

    /// Specializes a map between free modules.
    pub fn specialize(&self, map: &PolyMap) -> Result<SpecializedMatrix> {
        if map.target().blocks().iter().any(|b| b.quotient.is_some()) {
            return Err(Error::Validation("can only specialize maps between free modules".into()));
        }
        let target: GradedMultiset = map.target().blocks().iter().map(|b| b.degree).collect();
        if target.degrees() != map.target().blocks().iter().map(|b| b.degree).collect::<Vec<_>>() {
            return Err(Error::Validation("target blocks must be sorted by degree".into()));
        }
        let coeffs = map
            .entries()
            .iter()
            .map(|row| row.iter().map(|p| self.eval(p)).collect())
            .collect();
        Ok(SpecializedMatrix {
            source: map.source().clone(),
            target,
            coeffs,
            point: self.point.clone(),
        })
    }
}

/// A rational point avoiding every hyperplane `α = 0`, found by seeded
/// rejection sampling over a box that widens after repeated rejections.
pub fn specialize_to_line(r: usize, labels: &[Root], seed: u64) -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut range: i64 = 4;
    let mut attempts = 0;
    loop {
        let point: Vec<FieldElement> = (0..r)
            .map(|_| FieldElement::from_int(rng.gen_range(-range..=range)))
            .collect();
        let line = Line::new(point);
        if line.is_valid_for(labels) {
            return line;
        }
        attempts += 1;
        if attempts % 16 == 0 {
            range *= 2;
        }
    }
}

/// A homogeneous matrix over `k[T]` (`deg T = 2`). Entry `(i, j)` is
/// `coeffs[i][j] * T^{(source_j - target_i)/2}`; the exponent is implied by
/// the degrees, so only the scalar is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedMatrix {
    pub source: GradedMultiset,
    pub target: GradedMultiset,
    pub coeffs: Vec<Vec<FieldElement>>,
    pub point: Vec<FieldElement>,
}

impl SpecializedMatrix {
    fn exponent(&self, i: usize, j: usize) -> Option<u32> {
        poly_degree(self.source.degrees()[j], self.target.degrees()[i])
    }

    fn present(gens: &GradedMultiset, d: i32) -> Vec<usize> {
        (0..gens.len())
            .filter(|&i| poly_degree(d, gens.degrees()[i]).is_some())
            .collect()
    }

    /// Image of the degree-`d` source component, in target coordinates
    /// indexed by target generator.
    fn image(&self, d: i32) -> Vec<SparseVec> {
        Self::present(&self.source, d)
            .into_iter()
            .map(|j| {
                (0..self.target.len())
                    .filter(|&i| !self.coeffs[i][j].is_zero())
                    .map(|i| (i as u32, self.coeffs[i][j].clone()))
                    .collect()
            })
            .collect()
    }

    /// `dim coker_d`, computed directly from the degree-`d` matrix.
    pub fn cokernel_dim(&self, d: i32) -> usize {
        Self::present(&self.target, d).len() - linalg::rank(&self.image(d), self.target.len())
    }

    /// Whether `T^m: coker_{c-m} -> coker_{c+m}` is bijective.
    pub fn lefschetz_bijective(&self, center: i32, m: i32) -> bool {
        let (lo, hi) = (center - m, center + m);
        let (dlo, dhi) = (self.cokernel_dim(lo), self.cokernel_dim(hi));
        if dlo != dhi {
            return false;
        }
        let n = self.target.len();
        let image = self.image(hi);
        let base = linalg::rank(&image, n);
        // T^m sends the basis vector of generator i in degree lo to that of i
        // in degree hi.
        let mut joint = image;
        joint.extend(
            Self::present(&self.target, lo)
                .into_iter()
                .map(|i| vec![(i as u32, FieldElement::one())]),
        );
        linalg::rank(&joint, n) - base == dlo
    }

    /// Degrees in which the cokernel can be nonzero lie in
    /// `[min target, max source]`.
    pub fn degree_range(&self) -> (i32, i32) {
        let lo = self.target.min().unwrap_or(0);
        let hi = self.source.max().unwrap_or(lo).max(lo);
        (lo, hi)
    }
}

/// Summands `(k[T]/T^{n+1}){-g}` of a graded torsion `k[T]`-module.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TorsionDecomposition {
    /// Sorted `(g, n)` pairs.
    pub summands: Vec<(i32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct SummandJson {
    gen_degree: i32,
    length: u32,
}

impl Serialize for TorsionDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<SummandJson> = self
            .summands
            .iter()
            .map(|&(g, n)| SummandJson {
                gen_degree: g,
                length: n + 1,
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorsionDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<SummandJson>::deserialize(d)?;
        if v.iter().any(|s| s.length == 0) {
            return Err(serde::de::Error::custom("summand length must be positive"));
        }
        Ok(TorsionDecomposition::new(
            v.into_iter().map(|s| (s.gen_degree, s.length - 1)).collect(),
        ))
    }
}

impl TorsionDecomposition {
    pub fn new(mut summands: Vec<(i32, u32)>) -> Self {
        summands.sort_unstable();
        TorsionDecomposition { summands }
    }

    pub fn total_dim(&self) -> usize {
        self.summands.iter().map(|&(_, n)| n as usize + 1).sum()
    }

    pub fn hilbert(&self, d: i32) -> usize {
        self.summands
            .iter()
            .filter(|&&(g, n)| d >= g && d <= g + 2 * n as i32 && (d - g) % 2 == 0)
            .count()
    }

    pub fn top_degree(&self) -> Option<i32> {
        self.summands.iter().map(|&(g, n)| g + 2 * n as i32).max()
    }

    pub fn bottom_degree(&self) -> Option<i32> {
        self.summands.iter().map(|&(g, _)| g).min()
    }
}

/// Cokernel of an injective homogeneous square matrix over `k[T]`, by graded
/// Smith reduction: repeatedly take an entry of least `T`-degree as pivot and
/// clear its row and column with homogeneous operations.
pub fn graded_torsion_decomposition(m: &SpecializedMatrix) -> Result<TorsionDecomposition> {
    let (nt, ns) = (m.target.len(), m.source.len());
    if nt != ns {
        return Err(Error::Validation(format!(
            "source rank {ns} and target rank {nt} differ"
        )));
    }
    let mut a = m.coeffs.clone();
    let mut rows: Vec<usize> = (0..nt).collect();
    let mut cols: Vec<usize> = (0..ns).collect();
    let mut summands = Vec::new();
    while !rows.is_empty() {
        let pivot = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| (m.exponent(i, j).expect("nonzero entries are homogeneous"), i, j));
        let Some((pi, pj)) = pivot else {
            return Err(Error::Internal("specialized inclusion is not injective".into()));
        };
        let inv = a[pi][pj].inverse()?;
        for &i in &rows {
            if i != pi && !a[i][pj].is_zero() {
                let f = &a[i][pj] * &inv;
                for &j in &cols {
                    let d = &f * &a[pi][j];
                    a[i][j] = &a[i][j] - &d;
                }
            }
        }
        // Column operations only touch row `pi` now that column `pj` is clear.
        for &j in &cols {
            if j != pj {
                a[pi][j] = FieldElement::zero();
            }
        }
        let e = m.exponent(pi, pj).unwrap();
        if e > 0 {
            summands.push((m.target.degrees()[pi], e - 1));
        }
        rows.retain(|&i| i != pi);
        cols.retain(|&j| j != pj);
    }
    let out = TorsionDecomposition::new(summands);
    let (lo, hi) = m.degree_range();
    for d in lo..=hi {
        if out.hilbert(d) != m.cokernel_dim(d) {
            return Err(Error::Internal(format!(
                "torsion decomposition disagrees with the cokernel in degree {d}"
            )));
        }
    }
    Ok(out)
}
