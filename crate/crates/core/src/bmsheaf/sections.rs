use std::collections::BTreeMap;

use crate::coxeter::MomentGraph;
use crate::error::{Error, Result};
use crate::gradedlin::{free_dim, GradedMultiset, PolyMap};
use crate::linalg::{self, SparseVec};

/// Compatible tuples of a sheaf described by its stalks and, per edge
/// `E: w -> w'`, the maps `ρ_{w,E}` and `ρ_{w',E}` into `M^E`.
pub(crate) struct SectionProblem<'a> {
    pub r: usize,
    pub graph: &'a MomentGraph,
    pub stalks: &'a [GradedMultiset],
    pub lower: Vec<Option<&'a PolyMap>>,
    pub upper: Vec<Option<&'a PolyMap>>,
}

impl SectionProblem<'_> {
    pub fn stalk_dim(&self, v: usize, d: i32) -> usize {
        free_dim(&self.stalks[v], self.r, d)
    }

    /// Degree-`d` compatible tuples over `members`, projected to the stalks of
    /// `keep` (a subset of `members`); coordinates concatenate the `keep`
    /// stalks in order.
    pub fn project(&self, members: &[usize], keep: &[usize], d: i32) -> Result<Vec<SparseVec>> {
        let mut order: Vec<usize> = members.iter().copied().filter(|v| !keep.contains(v)).collect();
        let keep_from: usize = order.iter().map(|&v| self.stalk_dim(v, d)).sum();
        order.extend_from_slice(keep);
        let mut offset = BTreeMap::new();
        let mut ncols = 0;
        for &v in &order {
            offset.insert(v, ncols);
            ncols += self.stalk_dim(v, d);
        }
        let mut rows: Vec<SparseVec> = Vec::new();
        for (e, edge) in self.graph.edges.iter().enumerate() {
            let (Some(&lo), Some(&up)) = (offset.get(&edge.lower), offset.get(&edge.upper)) else {
                continue;
            };
            let (Some(a), Some(b)) = (self.lower[e], self.upper[e]) else {
                return Err(Error::Internal(format!("edge {e} has no restriction maps yet")));
            };
            let n = b.target().dim(d);
            let mut block: Vec<SparseVec> = vec![Vec::new(); n];
            for (c, col) in a.degree_matrix(d).iter().enumerate() {
                for (i, x) in col {
                    block[*i as usize].push(((lo + c) as u32, x.clone()));
                }
            }
            for (c, col) in b.degree_matrix(d).iter().enumerate() {
                for (i, x) in col {
                    block[*i as usize].push(((up + c) as u32, -x));
                }
            }
            for mut row in block {
                if !row.is_empty() {
                    row.sort_by_key(|(c, _)| *c);
                    rows.push(row);
                }
            }
        }
        Ok(linalg::project_kernel(&rows, ncols, keep_from))
    }
}

/// Degreewise bases of sections over an upward-closed vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    pub upset: Vec<usize>,
    /// Coordinates concatenate the stalks of `upset` in order.
    pub bases: BTreeMap<i32, Vec<SparseVec>>,
}

impl SectionSpace {
    pub fn dim(&self, d: i32) -> usize {
        self.bases.get(&d).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.bases.iter().map(|(d, b)| (*d, b.len())).collect()
    }
}

pub(crate) fn sections(
    problem: &SectionProblem<'_>,
    upset: &[usize],
    cap: i32,
) -> Result<SectionSpace> {
    if !problem.graph.is_upset(upset) {
        return Err(Error::Validation("vertex set is not upward closed".into()));
    }
    let degrees: Vec<i32> = (0..=cap).collect();
    let bases = crate::par::try_map(&degrees, |&d| problem.project(upset, upset, d))?;
    Ok(SectionSpace {
        upset: upset.to_vec(),
        bases: degrees.into_iter().zip(bases).collect(),
    })
}
