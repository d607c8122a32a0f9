//! Braden–MacPherson sheaves on the Bruhat graph of a lower interval `[e, x]`,
//! built top-down by projective covers, together with their defect modules,
//! sections, structure algebra and graded characters.

mod axioms;
mod sections;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use axioms::{check_bm_axioms, check_bm_axioms_up_to, AxiomCheck, AxiomReport};
pub use sections::SectionSpace;
use sections::SectionProblem;

use crate::coxeter::{interval_graph, Ball, ElementId, MomentGraph, Root};
use crate::error::{Error, Result};
use crate::gradedlin::{
    kernel_generators, minimal_generators, Ambient, GradedMultiset, GradedSpan, LinearQuotient,
    PolyMap,
};
use crate::hecke::{Basis, HeckeElement, LaurentPoly};
use crate::linalg::{Echelon, SparseVec};

pub const DEFAULT_CAP_MARGIN: u32 = 4;

/// A generator found above the expected bound but inside the safety margin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapFlag {
    pub vertex: usize,
    pub module: FlaggedModule,
    pub degree: i32,
    pub bound: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlaggedModule {
    Stalk,
    Defect,
}

/// `B(x)^{[y]}`: generator degrees and the inclusion into the stalk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub degrees: GradedMultiset,
    pub inclusion: PolyMap,
}

#[derive(Debug)]
pub struct BMSheaf {
    ball: Arc<Ball>,
    graph: MomentGraph,
    cap_margin: u32,
    quotients: Vec<Arc<LinearQuotient>>,
    stalks: Vec<GradedMultiset>,
    /// `ρ_{lower,E}` per edge.
    rho: Vec<PolyMap>,
    /// `ρ_{upper,E}`: reduction of the upper stalk modulo the label.
    reduce: Vec<PolyMap>,
    defects: Vec<Defect>,
    cap_report: Vec<CapFlag>,
}

impl PartialEq for BMSheaf {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
            && self.cap_margin == other.cap_margin
            && self.stalks == other.stalks
            && self.rho == other.rho
            && self.defects == other.defects
            && self.cap_report == other.cap_report
    }
}

fn edge_quotients(graph: &MomentGraph) -> Vec<Arc<LinearQuotient>> {
    let mut by_label: HashMap<Root, Arc<LinearQuotient>> = HashMap::new();
    graph
        .edges
        .iter()
        .map(|e| {
            by_label
                .entry(e.label.clone())
                .or_insert_with(|| LinearQuotient::new(e.label.clone()))
                .clone()
        })
        .collect()
}

/// Builds `B(x)`. Stalk generators are searched up to degree
/// `l(x) - l(y) + cap_margin` and defect generators up to
/// `2(l(x) - l(y)) + cap_margin`; anything beyond the expected bound is
/// recorded in the cap report.
pub fn build_bm(ball: &Arc<Ball>, x: ElementId, cap_margin: u32) -> Result<BMSheaf> {
    let graph = interval_graph(ball, x)?;
    let r = ball.system().rank();
    let n = graph.len();
    let quotients = edge_quotients(&graph);
    let mut stalks = vec![GradedMultiset::empty(); n];
    let mut rho: Vec<Option<PolyMap>> = vec![None; graph.edges.len()];
    let mut reduce: Vec<Option<PolyMap>> = vec![None; graph.edges.len()];
    let mut cap_report = Vec::new();
    let lx = ball.length(x) as i32;
    let margin = cap_margin as i32;

    let apex = n - 1;
    stalks[apex] = GradedMultiset::new(vec![0]);
    for &e in graph.in_edges(apex) {
        reduce[e] = Some(PolyMap::quotient(r, &stalks[apex], &quotients[e]));
    }
    for y in (0..apex).rev() {
        let gap = lx - graph.lengths[y] as i32;
        let cap = gap + margin;
        let out: Vec<usize> = graph.out_edges(y).to_vec();
        let keep: Vec<usize> = out.iter().map(|&e| graph.edges[e].upper).collect();
        let targets: Vec<&Ambient> = out.iter().map(|&e| reduce[e].as_ref().unwrap().target()).collect();
        let target = Ambient::concat(&targets, r);
        let problem = SectionProblem {
            r,
            graph: &graph,
            stalks: &stalks,
            lower: rho.iter().map(Option::as_ref).collect(),
            upper: reduce.iter().map(Option::as_ref).collect(),
        };
        let members = graph.strictly_above(y);
        let degrees: Vec<i32> = (0..=cap).collect();
        let images = crate::par::try_map(&degrees, |&d| -> Result<Vec<SparseVec>> {
            let proj = problem.project(members, &keep, d)?;
            Ok(edge_image(&problem, &out, &keep, &target, d, &proj))
        })?;
        let image: GradedSpan = degrees.into_iter().zip(images).collect();
        let gens = minimal_generators(&target, &image, cap)?;
        for (g, _) in &gens.vectors {
            if *g > gap {
                cap_report.push(CapFlag {
                    vertex: y,
                    module: FlaggedModule::Stalk,
                    degree: *g,
                    bound: gap,
                });
            }
        }
        let stalk = gens.degrees();
        let full = PolyMap::from_generators(&target, &gens)?;
        let mut row = 0;
        for (k, &e) in out.iter().enumerate() {
            let len = targets[k].blocks().len();
            let entries = full.entries()[row..row + len].to_vec();
            row += len;
            rho[e] = Some(PolyMap::new(stalk.clone(), targets[k].clone(), entries)?);
        }
        stalks[y] = stalk;
        for &e in graph.in_edges(y) {
            reduce[e] = Some(PolyMap::quotient(r, &stalks[y], &quotients[e]));
        }
    }
    let rho: Vec<PolyMap> = rho.into_iter().map(Option::unwrap).collect();
    let reduce: Vec<PolyMap> = reduce.into_iter().map(Option::unwrap).collect();
    let positions: Vec<usize> = (0..n).collect();
    let defects = crate::par::try_map(&positions, |&y| {
        let gap = lx - graph.lengths[y] as i32;
        compute_defect(r, &stalks[y], &graph, &rho, y, 2 * gap + margin)
    })?;
    for (y, d) in defects.iter().enumerate() {
        let bound = 2 * (lx - graph.lengths[y] as i32);
        for &g in d.degrees.degrees() {
            if g > bound {
                cap_report.push(CapFlag {
                    vertex: y,
                    module: FlaggedModule::Defect,
                    degree: g,
                    bound,
                });
            }
        }
    }
    Ok(BMSheaf {
        ball: ball.clone(),
        graph,
        cap_margin,
        quotients,
        stalks,
        rho,
        reduce,
        defects,
        cap_report,
    })
}

/// Image in `⊕_E B^{w_E}/α_E` of tuples projected onto the upper neighbours.
fn edge_image(
    problem: &SectionProblem<'_>,
    out: &[usize],
    keep: &[usize],
    target: &Ambient,
    d: i32,
    proj: &[SparseVec],
) -> Vec<SparseVec> {
    let dims: Vec<usize> = keep.iter().map(|&w| problem.stalk_dim(w, d)).collect();
    let mut ech = Echelon::new(target.dim(d));
    for v in proj {
        let mut img: SparseVec = Vec::new();
        let (mut src_off, mut dst_off) = (0usize, 0usize);
        for (k, &e) in out.iter().enumerate() {
            let part: SparseVec = v
                .iter()
                .filter(|(c, _)| (*c as usize) >= src_off && (*c as usize) < src_off + dims[k])
                .map(|(c, x)| (*c - src_off as u32, x.clone()))
                .collect();
            let red = problem.upper[e].expect("upper stalks are built first");
            for (c, x) in red.apply(d, &part) {
                img.push((c + dst_off as u32, x));
            }
            src_off += dims[k];
            dst_off += red.target().dim(d);
        }
        ech.insert(&img);
    }
    ech.rows().to_vec()
}

fn compute_defect(
    r: usize,
    stalk: &GradedMultiset,
    graph: &MomentGraph,
    rho: &[PolyMap],
    y: usize,
    cap: i32,
) -> Result<Defect> {
    let maps: Vec<&PolyMap> = graph.out_edges(y).iter().map(|&e| &rho[e]).collect();
    let stacked = PolyMap::stack(stalk, r, &maps)?;
    let (degrees, inclusion) = kernel_generators(&stacked, cap)?;
    Ok(Defect { degrees, inclusion })
}

impl BMSheaf {
    /// Reassembles a sheaf from stored stalks, restriction maps and defects.
    pub fn from_parts(
        ball: &Arc<Ball>,
        x: ElementId,
        cap_margin: u32,
        stalks: Vec<GradedMultiset>,
        rho: Vec<PolyMap>,
        defects: Vec<Defect>,
        cap_report: Vec<CapFlag>,
    ) -> Result<BMSheaf> {
        let graph = interval_graph(ball, x)?;
        let r = ball.system().rank();
        if stalks.len() != graph.len() || defects.len() != graph.len() || rho.len() != graph.edges.len() {
            return Err(Error::Validation("sheaf data does not match the interval".into()));
        }
        let quotients = edge_quotients(&graph);
        for (e, m) in rho.iter().enumerate() {
            let edge = &graph.edges[e];
            if m.source() != &stalks[edge.lower]
                || m.target() != &Ambient::quotient(r, &stalks[edge.upper], Some(&quotients[e]))
            {
                return Err(Error::Validation(format!("restriction map of edge {e} has the wrong shape")));
            }
        }
        let reduce = graph
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| PolyMap::quotient(r, &stalks[edge.upper], &quotients[e]))
            .collect();
        Ok(BMSheaf {
            ball: ball.clone(),
            graph,
            cap_margin,
            quotients,
            stalks,
            rho,
            reduce,
            defects,
            cap_report,
        })
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn x(&self) -> ElementId {
        self.graph.apex
    }

    pub fn graph(&self) -> &MomentGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.ball.system().rank()
    }

    pub fn cap_margin(&self) -> u32 {
        self.cap_margin
    }

    /// `l(x) - l(y)` for the vertex at position `y`.
    pub fn gap(&self, y: usize) -> i32 {
        (self.graph.lengths[self.graph.len() - 1] - self.graph.lengths[y]) as i32
    }

    pub fn stalks(&self) -> &[GradedMultiset] {
        &self.stalks
    }

    pub fn stalk(&self, y: usize) -> &GradedMultiset {
        &self.stalks[y]
    }

    /// Stalk at a group element; empty outside the interval.
    pub fn stalk_at(&self, y: ElementId) -> GradedMultiset {
        self.graph
            .position(y)
            .map(|p| self.stalks[p].clone())
            .unwrap_or_default()
    }

    pub fn rho(&self, edge: usize) -> &PolyMap {
        &self.rho[edge]
    }

    pub fn rho_maps(&self) -> &[PolyMap] {
        &self.rho
    }

    pub fn quotient(&self, edge: usize) -> &Arc<LinearQuotient> {
        &self.quotients[edge]
    }

    pub fn defects(&self) -> &[Defect] {
        &self.defects
    }

    pub fn defect(&self, y: usize) -> &Defect {
        &self.defects[y]
    }

    pub fn cap_report(&self) -> &[CapFlag] {
        &self.cap_report
    }

    pub(crate) fn problem(&self) -> SectionProblem<'_> {
        SectionProblem {
            r: self.rank(),
            graph: &self.graph,
            stalks: &self.stalks,
            lower: self.rho.iter().map(Some).collect(),
            upper: self.reduce.iter().map(Some).collect(),
        }
    }

    /// `dim B(x)^y_d`.
    pub fn stalk_dim(&self, y: usize, d: i32) -> usize {
        crate::gradedlin::free_dim(&self.stalks[y], self.rank(), d)
    }

    /// Sections over an upward-closed set of vertices, degrees `0..=cap`.
    pub fn sections(&self, upset: &[usize], cap: i32) -> Result<SectionSpace> {
        sections::sections(&self.problem(), upset, cap)
    }

    /// Degreewise image of `Γ({> y})` in `⊕_{E: y -> w} B^w/α_E`, degrees
    /// `0..=cap`, in the coordinates of the stacked restriction target.
    pub fn boundary_image(&self, y: usize, cap: i32) -> Result<GradedSpan> {
        let problem = self.problem();
        let out = self.graph.out_edges(y);
        let keep: Vec<usize> = out.iter().map(|&e| self.graph.edges[e].upper).collect();
        let target = self.boundary_target(y);
        let degrees: Vec<i32> = (0..=cap).collect();
        let images = crate::par::try_map(&degrees, |&d| -> Result<Vec<SparseVec>> {
            let proj = problem.project(self.graph.strictly_above(y), &keep, d)?;
            Ok(edge_image(&problem, out, &keep, &target, d, &proj))
        })?;
        Ok(degrees.into_iter().zip(images).collect())
    }

    /// `⊕_{E: y -> w} B^w/α_E`.
    pub fn boundary_target(&self, y: usize) -> Ambient {
        let targets: Vec<&Ambient> = self.graph.out_edges(y).iter().map(|&e| self.rho[e].target()).collect();
        Ambient::concat(&targets, self.rank())
    }

    /// The restriction `B^y -> ⊕_{E: y -> w} B^w/α_E`.
    pub fn boundary_map(&self, y: usize) -> Result<PolyMap> {
        let maps: Vec<&PolyMap> = self.graph.out_edges(y).iter().map(|&e| &self.rho[e]).collect();
        PolyMap::stack(&self.stalks[y], self.rank(), &maps)
    }

    /// `h(B(x)) = sum_y dim(B^{[y]}) v^{l(y) - l(x)} T~_y`, where a defect
    /// generator in degree `g` contributes `v^g`.
    pub fn graded_character(&self) -> HeckeElement {
        let mut h = HeckeElement::zero(Basis::Normalized);
        for (y, d) in self.defects.iter().enumerate() {
            let shift = -self.gap(y);
            for &g in d.degrees.degrees() {
                h.add_term(self.graph.vertices[y], &LaurentPoly::v(g + shift));
            }
        }
        h
    }

    /// Whether defect degrees mirror stalk degrees about `2(l(x) - l(y))`
    /// at every vertex (which also forces equal ungraded ranks).
    pub fn duality_holds(&self) -> bool {
        (0..self.graph.len()).all(|y| self.duality_at(y))
    }

    pub fn duality_at(&self, y: usize) -> bool {
        self.defects[y].degrees == self.stalks[y].mirror(2 * self.gap(y))
            && self.defects[y].degrees.len() == self.stalks[y].len()
    }

    /// Drops generator `index` of the stalk at `y` together with its column in
    /// every restriction map out of `y`. Only meant for building damaged
    /// sheaves as negative controls.
    pub fn remove_stalk_generator(&mut self, y: usize, index: usize) -> Result<()> {
        let mut degs = self.stalks[y].degrees().to_vec();
        if index >= degs.len() {
            return Err(Error::Validation(format!("stalk at {y} has no generator {index}")));
        }
        degs.remove(index);
        let stalk = GradedMultiset::new(degs);
        for &e in self.graph.out_edges(y) {
            let m = &self.rho[e];
            let entries = m
                .entries()
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != index).map(|(_, p)| p.clone()).collect())
                .collect();
            self.rho[e] = PolyMap::new(stalk.clone(), m.target().clone(), entries)?;
        }
        self.stalks[y] = stalk;
        Ok(())
    }
}

/// Degreewise dimensions of the structure algebra `Z` of the graph: tuples
/// `(z_v)` in `S` with `z_w ≡ z_w' mod α_E` for every edge, degrees `0..=cap`.
pub fn structure_algebra_hilbert(graph: &MomentGraph, r: usize, cap: i32) -> Result<Vec<usize>> {
    if graph.is_empty() {
        return Ok(vec![0; (cap.max(-1) + 1) as usize]);
    }
    let quotients = edge_quotients(graph);
    let stalks = vec![GradedMultiset::new(vec![0]); graph.len()];
    let maps: Vec<PolyMap> = quotients.iter().map(|q| PolyMap::quotient(r, &stalks[0], q)).collect();
    let problem = SectionProblem {
        r,
        graph,
        stalks: &stalks,
        lower: maps.iter().map(Some).collect(),
        upper: maps.iter().map(Some).collect(),
    };
    let all: Vec<usize> = (0..graph.len()).collect();
    let space = sections::sections(&problem, &all, cap)?;
    Ok((0..=cap).map(|d| space.dim(d)).collect())
}
