use serde::Serialize;

use super::BMSheaf;
use crate::error::Result;
use crate::gradedlin::{free_dim, minimal_generators, Ambient, GradedMultiset};
use crate::linalg::{self, Echelon};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Empty on success; otherwise the first counterexample found.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub principal_upsets_tested: usize,
    /// Highest degree examined by the flabbiness spot-check.
    pub flabby_cap: i32,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn verdict(name: &'static str, failure: Option<String>) -> AxiomCheck {
    AxiomCheck {
        name,
        passed: failure.is_none(),
        detail: failure.unwrap_or_default(),
    }
}

/// Checks the characterizing properties of `B(x)` on a built sheaf, with the
/// flabbiness spot-check run up to degree `l(x) + cap_margin`.
pub fn check_bm_axioms(sheaf: &BMSheaf) -> Result<AxiomReport> {
    let lx = sheaf.gap(0);
    check_bm_axioms_up_to(sheaf, lx + sheaf.cap_margin() as i32)
}

/// As [`check_bm_axioms`] with an explicit flabbiness degree cap.
///
/// Flabbiness is only tested on principal upsets `{>= w}`; the full condition
/// ranges over every upward-closed set.
pub fn check_bm_axioms_up_to(sheaf: &BMSheaf, flabby_cap: i32) -> Result<AxiomReport> {
    let g = sheaf.graph();
    let n = g.len();
    let apex = n - 1;
    let r = sheaf.rank();
    let margin = sheaf.cap_margin() as i32;
    let mut checks = Vec::new();

    checks.push(verdict(
        "apex",
        (sheaf.stalk(apex) != &GradedMultiset::new(vec![0]))
            .then(|| format!("stalk at the apex is {:?}", sheaf.stalk(apex))),
    ));

    let ball = sheaf.ball();
    checks.push(verdict(
        "support",
        g.vertices
            .iter()
            .find(|&&v| !ball.bruhat_leq(v, sheaf.x()))
            .map(|&v| format!("vertex {} is not below the apex", ball.format(v))),
    ));

    let edge_failure = g.edges.iter().enumerate().find_map(|(e, edge)| {
        let m = sheaf.rho(e);
        let want = Ambient::quotient(r, sheaf.stalk(edge.upper), Some(sheaf.quotient(e)));
        (m.target() != &want || m.annihilator().is_some_and(|q| q.root() != &edge.label))
            .then(|| format!("edge {e}: restriction target is not the upper stalk modulo its label"))
    });
    checks.push(verdict("edge-modules", edge_failure));

    let mut cover_failure = None;
    let mut surj_failure = None;
    for y in 0..apex {
        let cap = sheaf.gap(y) + margin;
        let image = sheaf.boundary_image(y, cap)?;
        let target = sheaf.boundary_target(y);
        if cover_failure.is_none() {
            let gens = minimal_generators(&target, &image, cap)?;
            if &gens.degrees() != sheaf.stalk(y) {
                cover_failure = Some(format!(
                    "vertex {}: stalk {:?} but the boundary image needs generators {:?}",
                    ball.format(g.vertices[y]),
                    sheaf.stalk(y),
                    gens.degrees()
                ));
            }
        }
        if surj_failure.is_none() {
            let map = sheaf.boundary_map(y)?;
            for (&d, basis) in &image {
                let dim = target.dim(d);
                let mut span = Echelon::new(dim);
                for v in basis {
                    span.insert(v);
                }
                let cols = map.degree_matrix(d);
                let got = linalg::rank(&cols, dim);
                if got != span.rank() || cols.iter().any(|c| !span.contains(c)) {
                    surj_failure = Some(format!(
                        "vertex {}, degree {d}: stalk image has dimension {got}, boundary image {}",
                        ball.format(g.vertices[y]),
                        span.rank()
                    ));
                    break;
                }
            }
        }
    }
    checks.push(verdict("minimal-cover", cover_failure));
    checks.push(verdict("surjective-cover", surj_failure));

    let mut defect_failure = None;
    'outer: for y in 0..n {
        let map = sheaf.boundary_map(y)?;
        let cap = 2 * sheaf.gap(y) + margin;
        let degs = &sheaf.defect(y).degrees;
        for d in 0..=cap {
            let cols = map.degree_matrix(d);
            let ker = cols.len() - linalg::rank(&cols, map.target().dim(d));
            let free = free_dim(degs, r, d);
            if ker != free {
                defect_failure = Some(format!(
                    "vertex {}, degree {d}: kernel dimension {ker}, free module on {degs:?} has {free}",
                    ball.format(g.vertices[y])
                ));
                break 'outer;
            }
        }
    }
    checks.push(verdict("defects-free", defect_failure));

    let all: Vec<usize> = (0..n).collect();
    let problem = sheaf.problem();
    let mut flabby_failure = None;
    'upsets: for w in 0..n {
        let mut upset: Vec<usize> = g.strictly_above(w).to_vec();
        upset.push(w);
        upset.sort_unstable();
        let local = sheaf.sections(&upset, flabby_cap)?;
        for d in 0..=flabby_cap {
            let restricted = problem.project(&all, &upset, d)?.len();
            if restricted != local.dim(d) {
                flabby_failure = Some(format!(
                    "upset above {}, degree {d}: global sections restrict to dimension {restricted} of {}",
                    ball.format(g.vertices[w]),
                    local.dim(d)
                ));
                break 'upsets;
            }
        }
    }
    checks.push(verdict("flabby-principal", flabby_failure));

    Ok(AxiomReport {
        checks,
        principal_upsets_tested: n,
        flabby_cap,
    })
}
