use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::module::{minimal_generators, poly_degree, Ambient, Generators, GradedMultiset, GradedSpan};
use super::poly::{monomial_basis, LinearQuotient, Monomial, Poly};
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::linalg::{self, SparseVec};

/// A degree-0 homomorphism from the free module on `source` into `target`,
/// given by the images of the generators: `entries[i][j]` is the component in
/// target block `i` of the image of generator `j`.
pub struct PolyMap {
    source: GradedMultiset,
    target: Ambient,
    entries: Vec<Vec<Poly>>,
    cache: Mutex<HashMap<i32, Arc<Vec<SparseVec>>>>,
}

impl Clone for PolyMap {
    fn clone(&self) -> Self {
        PolyMap {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.entries == other.entries
    }
}

impl Eq for PolyMap {}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("entries", &self.entries)
            .finish()
    }
}

impl PolyMap {
    /// Validates homogeneity and stores entries reduced modulo the target
    /// quotients.
    pub fn new(source: GradedMultiset, target: Ambient, entries: Vec<Vec<Poly>>) -> Result<Self> {
        if entries.len() != target.blocks().len()
            || entries.iter().any(|row| row.len() != source.len())
        {
            return Err(Error::Validation("polynomial matrix has the wrong shape".into()));
        }
        let mut reduced = Vec::with_capacity(entries.len());
        for (i, row) in entries.into_iter().enumerate() {
            let block = &target.blocks()[i];
            let mut out = Vec::with_capacity(row.len());
            for (j, p) in row.into_iter().enumerate() {
                let p = match &block.quotient {
                    Some(q) => q.reduce(&p),
                    None => p,
                };
                if let Some(k) = p.degree() {
                    let want = poly_degree(source.degrees()[j], block.degree);
                    if !p.is_homogeneous() || want != Some(k) {
                        return Err(Error::Validation(format!(
                            "entry ({i}, {j}) is not homogeneous of degree {}",
                            source.degrees()[j] - block.degree
                        )));
                    }
                }
                out.push(p);
            }
            reduced.push(out);
        }
        Ok(PolyMap {
            source,
            target,
            entries: reduced,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// The canonical map `S^gens -> (S/α)^gens`.
    pub fn quotient(r: usize, gens: &GradedMultiset, q: &Arc<LinearQuotient>) -> Self {
        let n = gens.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Poly::constant(r, FieldElement::one())
                        } else {
                            Poly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(gens.clone(), Ambient::quotient(r, gens, Some(q)), entries)
            .expect("identity is homogeneous")
    }

    /// Maps with a common source combined into one map to the direct sum of
    /// their targets.
    pub fn stack(source: &GradedMultiset, r: usize, maps: &[&PolyMap]) -> Result<Self> {
        if maps.iter().any(|m| m.source != *source) {
            return Err(Error::Validation("stacked maps need a common source".into()));
        }
        let targets: Vec<&Ambient> = maps.iter().map(|m| &m.target).collect();
        let entries = maps.iter().flat_map(|m| m.entries.iter().cloned()).collect();
        Self::new(source.clone(), Ambient::concat(&targets, r), entries)
    }

    pub fn source(&self) -> &GradedMultiset {
        &self.source
    }

    pub fn target(&self) -> &Ambient {
        &self.target
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    /// The quotient shared by every target block, if any.
    pub fn annihilator(&self) -> Option<&Arc<LinearQuotient>> {
        let first = self.target.blocks().first()?.quotient.as_ref()?;
        self.target
            .blocks()
            .iter()
            .all(|b| b.quotient.as_ref() == Some(first))
            .then_some(first)
    }

    pub fn source_ambient(&self) -> Ambient {
        Ambient::free(self.target.rank(), &self.source)
    }

    /// Matrix of the degree-`d` component as sparse columns, one per basis
    /// element of the source in degree `d`.
    pub fn degree_matrix(&self, d: i32) -> Arc<Vec<SparseVec>> {
        if let Some(m) = self.cache.lock().unwrap().get(&d) {
            return m.clone();
        }
        let r = self.target.rank();
        let layout = self.target.layout(d);
        let mut cols = Vec::new();
        for (j, &g) in self.source.degrees().iter().enumerate() {
            let Some(k) = poly_degree(d, g) else { continue };
            for m in &monomial_basis(r, k, None).monomials {
                let parts: Vec<(usize, Poly)> = self
                    .entries
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| !row[j].is_zero())
                    .map(|(i, row)| (i, row[j].mul_monomial(m)))
                    .collect();
                cols.push(
                    self.target
                        .encode(d, &layout, &parts)
                        .expect("homogeneous entries land in degree d"),
                );
            }
        }
        let m = Arc::new(cols);
        self.cache.lock().unwrap().insert(d, m.clone());
        m
    }

    /// Image of a source vector of degree `d`.
    pub fn apply(&self, d: i32, v: &SparseVec) -> SparseVec {
        linalg::apply_columns(&self.degree_matrix(d), v, self.target.dim(d))
    }

    /// Degreewise kernel bases from the lowest source degree up to `cap`.
    pub fn kernel_span(&self, cap: i32) -> GradedSpan {
        let mut out = GradedSpan::new();
        let Some(lo) = self.source.min() else {
            return out;
        };
        for d in lo..=cap {
            let cols = self.degree_matrix(d);
            let rows = linalg::transpose(&cols, self.target.dim(d));
            out.insert(d, linalg::nullspace(&rows, cols.len()));
        }
        out
    }

    /// The map from the free module on `gens` sending each generator to its
    /// vector in `ambient`. Generators must be listed by increasing degree.
    pub fn from_generators(ambient: &Ambient, gens: &Generators) -> Result<Self> {
        if gens.vectors.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(Error::Validation("generators must be sorted by degree".into()));
        }
        let mut entries = vec![Vec::with_capacity(gens.vectors.len()); ambient.blocks().len()];
        for (d, v) in &gens.vectors {
            let polys = ambient.decode(&ambient.layout(*d), v);
            for (i, p) in polys.into_iter().enumerate() {
                entries[i].push(p);
            }
        }
        Self::new(gens.degrees(), ambient.clone(), entries)
    }
}

/// Minimal generators of `ker(map)` up to `cap`, with the inclusion into the
/// source as a [`PolyMap`].
pub fn kernel_generators(map: &PolyMap, cap: i32) -> Result<(GradedMultiset, PolyMap)> {
    let source = map.source_ambient();
    let gens = minimal_generators(&source, &map.kernel_span(cap), cap)?;
    let inclusion = PolyMap::from_generators(&source, &gens)?;
    Ok((gens.degrees(), inclusion))
}

/// Monomial `α_i` as a polynomial.
pub fn var(r: usize, i: usize) -> Poly {
    Poly::term(Monomial::var(r, i), FieldElement::one())
}
