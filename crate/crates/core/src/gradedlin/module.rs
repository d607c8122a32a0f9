use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly::{monomial_basis, LinearQuotient, Monomial, MonomialBasis, Poly};
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::linalg::{Echelon, SparseVec};

/// Generator degrees of a graded free module `⊕_i S{-d_i}`, sorted.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedMultiset(Vec<i32>);

impl GradedMultiset {
    pub fn new(mut degrees: Vec<i32>) -> Self {
        degrees.sort_unstable();
        GradedMultiset(degrees)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn degrees(&self) -> &[i32] {
        &self.0
    }

    /// Ungraded rank.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<i32> {
        self.0.last().copied()
    }

    pub fn min(&self) -> Option<i32> {
        self.0.first().copied()
    }

    /// `{c - d : d in self}`.
    pub fn mirror(&self, c: i32) -> Self {
        Self::new(self.0.iter().map(|d| c - d).collect())
    }
}

impl fmt::Debug for GradedMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromIterator<i32> for GradedMultiset {
    fn from_iter<I: IntoIterator<Item = i32>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Polynomial degree of the degree-`d` part of `S{-g}`, if nonzero.
pub(crate) fn poly_degree(d: i32, g: i32) -> Option<u32> {
    (d >= g && (d - g) % 2 == 0).then(|| ((d - g) / 2) as u32)
}

/// Dimension of `(⊕_i S{-g_i})_d` over `r` variables with its basis of
/// `(generator index, monomial)` pairs.
pub fn degree_dim(module: &GradedMultiset, r: usize, d: i32) -> (usize, Vec<(usize, Monomial)>) {
    let mut basis = Vec::new();
    for (i, &g) in module.degrees().iter().enumerate() {
        if let Some(k) = poly_degree(d, g) {
            for m in &monomial_basis(r, k, None).monomials {
                basis.push((i, m.clone()));
            }
        }
    }
    (basis.len(), basis)
}

/// `dim (⊕_i S{-g_i})_d` over `r` variables.
pub fn free_dim(module: &GradedMultiset, r: usize, d: i32) -> usize {
    module
        .degrees()
        .iter()
        .filter_map(|&g| poly_degree(d, g))
        .map(|k| monomial_basis(r, k, None).len())
        .sum()
}

/// One summand of an [`Ambient`]: `S{-degree}` or `(S/α){-degree}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub degree: i32,
    pub quotient: Option<Arc<LinearQuotient>>,
}

/// Layout of the degree-`d` component of an [`Ambient`].
#[derive(Debug)]
pub struct Layout {
    pub offsets: Vec<usize>,
    pub bases: Vec<Option<Arc<MonomialBasis>>>,
    pub dim: usize,
}

/// A direct sum of shifted copies of `S` and of quotients `S/α`. Vectors of
/// the degree-`d` component are sparse over the concatenated block bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    r: usize,
    blocks: Vec<Block>,
}

impl Ambient {
    pub fn new(r: usize, blocks: Vec<Block>) -> Self {
        Ambient { r, blocks }
    }

    pub fn free(r: usize, gens: &GradedMultiset) -> Self {
        Self::quotient(r, gens, None)
    }

    pub fn quotient(r: usize, gens: &GradedMultiset, q: Option<&Arc<LinearQuotient>>) -> Self {
        Ambient {
            r,
            blocks: gens
                .degrees()
                .iter()
                .map(|&degree| Block {
                    degree,
                    quotient: q.cloned(),
                })
                .collect(),
        }
    }

    /// Direct sum.
    pub fn concat(parts: &[&Ambient], r: usize) -> Self {
        Ambient {
            r,
            blocks: parts.iter().flat_map(|a| a.blocks.iter().cloned()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn layout(&self, d: i32) -> Layout {
        let mut offsets = Vec::with_capacity(self.blocks.len());
        let mut bases = Vec::with_capacity(self.blocks.len());
        let mut dim = 0;
        for b in &self.blocks {
            offsets.push(dim);
            let basis = poly_degree(d, b.degree)
                .map(|k| monomial_basis(self.r, k, b.quotient.as_ref().map(|q| q.pivot())));
            dim += basis.as_ref().map_or(0, |x| x.len());
            bases.push(basis);
        }
        Layout { offsets, bases, dim }
    }

    pub fn dim(&self, d: i32) -> usize {
        self.layout(d).dim
    }

    /// Coordinates of `(p_b)_b` in degree `d`; each `p_b` is reduced modulo
    /// its block's quotient first.
    pub fn encode(&self, d: i32, layout: &Layout, parts: &[(usize, Poly)]) -> Result<SparseVec> {
        let mut out: BTreeMap<u32, FieldElement> = BTreeMap::new();
        for (b, p) in parts {
            let block = &self.blocks[*b];
            let p = match &block.quotient {
                Some(q) => q.reduce(p),
                None => p.clone(),
            };
            if p.is_zero() {
                continue;
            }
            let basis = layout.bases[*b].as_ref().ok_or_else(|| {
                Error::Internal(format!("block {b} has nothing in degree {d}"))
            })?;
            for (m, c) in p.terms() {
                let i = basis.index_of(m).ok_or_else(|| {
                    Error::Internal(format!("monomial {m:?} outside block {b} in degree {d}"))
                })?;
                let slot = out
                    .entry(layout.offsets[*b] as u32 + i)
                    .or_insert_with(FieldElement::zero);
                *slot = &*slot + c;
            }
        }
        Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Inverse of [`Ambient::encode`]: one polynomial per block.
    pub fn decode(&self, layout: &Layout, v: &SparseVec) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.blocks.len()];
        for (idx, c) in v {
            let idx = *idx as usize;
            let b = layout.offsets.partition_point(|&o| o <= idx) - 1;
            // Skip empty blocks sharing the same offset.
            let b = (b..self.blocks.len())
                .rev()
                .find(|&b| {
                    layout.offsets[b] <= idx
                        && layout.bases[b]
                            .as_ref()
                            .is_some_and(|x| idx < layout.offsets[b] + x.len())
                })
                .expect("index inside layout");
            let m = &layout.bases[b].as_ref().unwrap().monomials[idx - layout.offsets[b]];
            out[b].add_term(m.clone(), c);
        }
        out
    }

    /// `α_i * v` for `v` of degree `d`; result in degree `d + 2`.
    pub fn mul_var(&self, d: i32, v: &SparseVec, i: usize) -> SparseVec {
        let from = self.layout(d);
        let to = self.layout(d + 2);
        let parts: Vec<(usize, Poly)> = self
            .decode(&from, v)
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(b, p)| (b, p.mul_monomial(&Monomial::var(self.r, i))))
            .collect();
        self.encode(d + 2, &to, &parts)
            .expect("products stay inside the ambient")
    }

    /// Generators of `V * U` for `U` spanned by `basis` in degree `d`.
    pub fn v_times(&self, d: i32, basis: &[SparseVec]) -> Vec<SparseVec> {
        let mut out = Vec::with_capacity(basis.len() * self.r);
        for v in basis {
            for i in 0..self.r {
                out.push(self.mul_var(d, v, i));
            }
        }
        out
    }
}

/// Homogeneous generators of a graded submodule, as vectors in an ambient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub vectors: Vec<(i32, SparseVec)>,
}

impl Generators {
    pub fn degrees(&self) -> GradedMultiset {
        self.vectors.iter().map(|(d, _)| *d).collect()
    }

    /// Only the generators of degree `<= k`.
    pub fn truncated(&self, k: i32) -> Generators {
        Generators {
            vectors: self.vectors.iter().filter(|(d, _)| *d <= k).cloned().collect(),
        }
    }
}

/// Degreewise bases of a graded subspace; absent degrees are zero.
pub type GradedSpan = BTreeMap<i32, Vec<SparseVec>>;

/// Minimal homogeneous generators of the submodule whose degree-`d` parts are
/// `image[d]`, for `d <= cap`. In each degree the new generators complement
/// `V * image_{d-2}`; an image that is not `V`-stable is rejected.
pub fn minimal_generators(ambient: &Ambient, image: &GradedSpan, cap: i32) -> Result<Generators> {
    let mut out = Generators::default();
    let Some((&lo, _)) = image.iter().find(|(_, b)| !b.is_empty()) else {
        return Ok(out);
    };
    let mut d = lo;
    while d <= cap {
        let empty = Vec::new();
        let here = image.get(&d).unwrap_or(&empty);
        let below = image.get(&(d - 2)).unwrap_or(&empty);
        let dim = ambient.dim(d);
        let mut full = Echelon::new(dim);
        for v in here {
            full.insert(v);
        }
        let mut span = Echelon::new(dim);
        for w in ambient.v_times(d - 2, below) {
            if !full.contains(&w) {
                return Err(Error::Validation(format!(
                    "image is not stable under V in degree {d}"
                )));
            }
            span.insert(&w);
        }
        for v in here {
            if span.insert(v) {
                out.vectors.push((d, v.clone()));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Degreewise bases (from the lowest generator degree up to `cap`) of the
/// submodule generated by `gens`.
pub fn generated_span(ambient: &Ambient, gens: &Generators, cap: i32) -> GradedSpan {
    let mut out = GradedSpan::new();
    let Some(lo) = gens.vectors.iter().map(|(d, _)| *d).min() else {
        return out;
    };
    for d in lo..=cap {
        let mut ech = Echelon::new(ambient.dim(d));
        if let Some(prev) = out.get(&(d - 2)) {
            for w in ambient.v_times(d - 2, prev) {
                ech.insert(&w);
            }
        }
        for (g, v) in &gens.vectors {
            if *g == d {
                ech.insert(v);
            }
        }
        out.insert(d, ech.rows().to_vec());
    }
    out
}

/// Lowest degree `<= cap` in which two graded submodules meet nontrivially,
/// with the dimension of the intersection there.
pub fn first_intersection(
    ambient: &Ambient,
    a: &Generators,
    b: &Generators,
    cap: i32,
) -> Option<(i32, usize)> {
    let sa = generated_span(ambient, a, cap);
    let sb = generated_span(ambient, b, cap);
    for (d, va) in &sa {
        let Some(vb) = sb.get(d) else { continue };
        if va.is_empty() || vb.is_empty() {
            continue;
        }
        let k = crate::linalg::intersection_dim(va, vb, ambient.dim(*d));
        if k > 0 {
            return Some((*d, k));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::Root;

    fn one() -> FieldElement {
        FieldElement::one()
    }

    #[test]
    fn degree_dims() {
        let m = GradedMultiset::new(vec![0]);
        assert_eq!(degree_dim(&m, 1, 4).0, 1);
        assert_eq!(degree_dim(&m, 2, 4).0, 3);
        assert_eq!(degree_dim(&GradedMultiset::new(vec![2]), 1, 0).0, 0);
        assert_eq!(degree_dim(&m, 2, 3).0, 0);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let q = LinearQuotient::new(Root(vec![one(), one()]));
        let amb = Ambient::new(
            2,
            vec![
                Block { degree: 0, quotient: None },
                Block { degree: 2, quotient: Some(q) },
                Block { degree: 4, quotient: None },
            ],
        );
        let lay = amb.layout(4);
        assert_eq!(lay.dim, 3 + 1 + 1);
        let p0 = Poly::term(Monomial(vec![1, 1]), FieldElement::from_int(5));
        let p1 = Poly::term(Monomial(vec![1, 0]), FieldElement::from_int(2));
        let p2 = Poly::constant(2, FieldElement::from_int(-1));
        let v = amb.encode(4, &lay, &[(0, p0.clone()), (1, p1.clone()), (2, p2.clone())]).unwrap();
        assert_eq!(amb.decode(&lay, &v), vec![p0, p1, p2]);
    }

    #[test]
    fn minimal_generators_of_quotient() {
        // Image = all of S/α in A1: one generator in degree 0.
        let q = LinearQuotient::new(Root(vec![one()]));
        let amb = Ambient::quotient(1, &GradedMultiset::new(vec![0]), Some(&q));
        let mut image = GradedSpan::new();
        for d in 0..=6 {
            let lay = amb.layout(d);
            image.insert(d, (0..lay.dim as u32).map(|i| vec![(i, one())]).collect());
        }
        let g = minimal_generators(&amb, &image, 6).unwrap();
        assert_eq!(g.degrees(), GradedMultiset::new(vec![0]));
        assert!(minimal_generators(&amb, &GradedSpan::new(), 6).unwrap().vectors.is_empty());
    }

    #[test]
    fn minimal_generators_diagonal() {
        // A1 x A1: image of sections in (S/α_s) ⊕ (S/α_t) is generated by (1, 1).
        let qs = LinearQuotient::new(Root(vec![one(), FieldElement::zero()]));
        let qt = LinearQuotient::new(Root(vec![FieldElement::zero(), one()]));
        let amb = Ambient::new(
            2,
            vec![Block { degree: 0, quotient: Some(qs) }, Block { degree: 0, quotient: Some(qt) }],
        );
        let gens = Generators {
            vectors: vec![(0, amb.encode(0, &amb.layout(0), &[(0, Poly::constant(2, one())), (1, Poly::constant(2, one()))]).unwrap())],
        };
        let span = generated_span(&amb, &gens, 8);
        assert_eq!(span[&2].len(), 2);
        let g = minimal_generators(&amb, &span, 8).unwrap();
        assert_eq!(g.degrees(), GradedMultiset::new(vec![0]));
        // Idempotence.
        let again = minimal_generators(&amb, &generated_span(&amb, &g, 8), 8).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn non_stable_image_rejected() {
        let amb = Ambient::free(1, &GradedMultiset::new(vec![0]));
        let mut image = GradedSpan::new();
        image.insert(0, vec![vec![(0, one())]]);
        assert!(minimal_generators(&amb, &image, 4).is_err());
    }
}
