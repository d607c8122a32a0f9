use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::gradedlin::{
    first_intersection, monomial_basis, Ambient, Generators, GradedMultiset, Poly, PolyMap,
};
use crate::linalg;

/// Graded maps `f: ⊕_j S{-l-k_j} -> ⊕_i S{-l+k_i}` over `r` variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericMapProblem {
    pub l: i32,
    pub ks: Vec<u32>,
    pub r: usize,
}

/// What one map satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenmapsOutcome {
    pub injective: bool,
    /// Smallest `m` whose truncation condition fails, if any.
    pub failing_m: Option<u32>,
}

impl GenmapsOutcome {
    pub fn ok(&self) -> bool {
        self.injective && self.failing_m.is_none()
    }
}

impl GenericMapProblem {
    fn source(&self) -> GradedMultiset {
        self.ks.iter().map(|&k| self.l + k as i32).collect()
    }

    fn target(&self) -> GradedMultiset {
        self.ks.iter().map(|&k| self.l - k as i32).collect()
    }

    /// `(source gen j, target gen i)` in the sorted generator orders.
    fn source_k(&self) -> Vec<u32> {
        let mut k = self.ks.clone();
        k.sort_unstable();
        k
    }

    fn target_k(&self) -> Vec<u32> {
        let mut k = self.ks.clone();
        k.sort_unstable_by(|a, b| b.cmp(a));
        k
    }

    /// Polynomial degree of entry `(i, j)`, or `None` if the grading forces 0.
    pub fn entry_degree(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.target_k()[i] + self.source_k()[j];
        d.is_multiple_of(2).then_some(d / 2)
    }

    /// Wraps an entry matrix `[target gen][source gen]` (both in ascending
    /// degree order) as a map.
    pub fn map(&self, entries: Vec<Vec<Poly>>) -> Result<PolyMap> {
        PolyMap::new(self.source(), Ambient::free(self.r, &self.target()), entries)
    }

    /// A map with every coefficient uniform in `[-range, range]`.
    pub fn sample(&self, rng: &mut impl Rng, range: i64) -> Result<PolyMap> {
        let n = self.ks.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut p = Poly::zero();
                        if let Some(k) = self.entry_degree(i, j) {
                            for m in &monomial_basis(self.r, k, None).monomials {
                                let c = FieldElement::from_int(rng.gen_range(-range..=range));
                                p.add_term(m.clone(), &c);
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        self.map(entries)
    }

    /// Degree up to which injectivity is checked: a kernel element of a map
    /// between free modules of rank `n` has a generator no higher than the
    /// top source degree plus `n - 1` entry degrees.
    pub fn cap(&self) -> i32 {
        let kmax = self.ks.iter().copied().max().unwrap_or(0) as i32;
        let n = self.ks.len() as i32;
        self.l + kmax + 2 * (n - 1).max(0) * kmax + 2
    }

    /// Injectivity and `f(M_{<= l+m-1}) ∩ N_{<= l-m} = 0` for `m = 1..=max k`.
    pub fn check(&self, f: &PolyMap) -> Result<GenmapsOutcome> {
        if f.source() != &self.source() || f.target() != &Ambient::free(self.r, &self.target()) {
            return Err(Error::Validation("map does not match the problem's shape".into()));
        }
        let cap = self.cap();
        let lo = self.source().min().unwrap_or(0);
        let injective = (lo..=cap).all(|d| {
            let cols = f.degree_matrix(d);
            linalg::rank(&cols, f.target().dim(d)) == cols.len()
        });
        let target = f.target();
        let source = f.source_ambient();
        let unit = |amb: &Ambient, j: usize| {
            let g = amb.blocks()[j].degree;
            (g, vec![(amb.layout(g).offsets[j] as u32, FieldElement::one())])
        };
        let kmax = self.ks.iter().copied().max().unwrap_or(0);
        let failing_m = (1..=kmax).find(|&m| {
            let m = m as i32;
            let a = Generators {
                vectors: (0..source.blocks().len())
                    .filter(|&j| source.blocks()[j].degree < self.l + m)
                    .map(|j| {
                        let (g, e) = unit(&source, j);
                        (g, f.apply(g, &e))
                    })
                    .collect(),
            };
            let b = Generators {
                vectors: (0..target.blocks().len())
                    .filter(|&i| target.blocks()[i].degree <= self.l - m)
                    .map(|i| unit(target, i))
                    .collect(),
            };
            first_intersection(target, &a, &b, cap).is_some()
        });
        Ok(GenmapsOutcome { injective, failing_m })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenmapsParams {
    pub problem: GenericMapProblem,
    pub trials: usize,
    pub seed: u64,
    pub coeff_range: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenmapsReport {
    pub params: GenmapsParams,
    pub satisfied: usize,
    pub not_injective: usize,
    pub truncation_failures: usize,
    pub fraction: f64,
    /// Trial indices of the failures, for reproduction.
    pub failed_trials: Vec<usize>,
}

/// Samples `trials` maps, trial `t` drawing from a generator seeded with
/// `seed + t`, and counts how many satisfy both conditions.
pub fn genmaps_sample(params: &GenmapsParams) -> Result<GenmapsReport> {
    if params.trials == 0 {
        return Err(Error::Validation("at least one trial is required".into()));
    }
    let trials: Vec<usize> = (0..params.trials).collect();
    let outcomes = crate::par::try_map(&trials, |&t| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64));
        let f = params.problem.sample(&mut rng, params.coeff_range)?;
        params.problem.check(&f)
    })?;
    let failed_trials: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.ok())
        .map(|(t, _)| t)
        .collect();
    let satisfied = params.trials - failed_trials.len();
    Ok(GenmapsReport {
        params: params.clone(),
        satisfied,
        not_injective: outcomes.iter().filter(|o| !o.injective).count(),
        truncation_failures: outcomes.iter().filter(|o| o.failing_m.is_some()).count(),
        fraction: satisfied as f64 / params.trials as f64,
        failed_trials,
    })
}
