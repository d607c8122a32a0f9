use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Ball, ElementId, Mat};
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;

/// A positive root in simple-root coordinates, scaled so that its first
/// nonzero coordinate is 1. It stands for the line it spans.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Root(pub Vec<FieldElement>);

impl Root {
    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    /// Index of the last nonzero coordinate; the variable eliminated in `S/α`.
    pub fn pivot(&self) -> usize {
        self.0
            .iter()
            .rposition(|c| !c.is_zero())
            .expect("roots are nonzero")
    }

    /// `α(p)` for a point `p` of `V*` in dual coordinates.
    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        self.0
            .iter()
            .zip(point)
            .fold(FieldElement::zero(), |acc, (a, p)| &acc + &(a * p))
    }

    /// The reflection root of `t` as the normalized column space of `t - 1`.
    pub fn of_reflection(t: &Mat) -> Result<Root> {
        let diff = t.minus_identity();
        let col = (0..diff.dim())
            .map(|j| diff.column(j))
            .find(|c| c.iter().any(|x| !x.is_zero()))
            .ok_or_else(|| Error::Internal("identity has no root".into()))?;
        let lead = col.iter().find(|x| !x.is_zero()).unwrap().clone();
        let inv = lead.inverse()?;
        let coords: Vec<FieldElement> = col.iter().map(|x| x * &inv).collect();
        if coords.iter().any(|x| x.sign() == Ordering::Less) {
            return Err(Error::Internal(format!(
                "normalized root {coords:?} has mixed signs"
            )));
        }
        Ok(Root(coords))
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Directed edge `lower -> upper` with `upper = t * lower`; endpoints are
/// positions in [`MomentGraph::vertices`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub lower: usize,
    pub upper: usize,
    pub label: Root,
}

/// The labelled Bruhat graph on a lower interval `[e, x]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MomentGraph {
    pub apex: ElementId,
    /// Sorted by length, then id; the apex is last.
    pub vertices: Vec<ElementId>,
    pub lengths: Vec<usize>,
    pub edges: Vec<Edge>,
    position: HashMap<ElementId, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    /// `above[v]` lists vertices strictly above `v` in Bruhat order.
    above: Vec<Vec<usize>>,
}

impl MomentGraph {
    pub fn position(&self, id: ElementId) -> Option<usize> {
        self.position.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges starting at `v` and pointing up.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Edges ending at `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn strictly_above(&self, v: usize) -> &[usize] {
        &self.above[v]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.above[a].contains(&b)
    }

    /// Whether a vertex set is closed upward inside the graph.
    pub fn is_upset(&self, set: &[usize]) -> bool {
        set.iter()
            .all(|&v| self.above[v].iter().all(|w| set.contains(w)))
    }

    /// Labels of edges at each vertex are pairwise non-proportional. Labels are
    /// normalized, so this is distinctness.
    pub fn check_gkm(&self) -> bool {
        (0..self.len()).all(|v| {
            let mut seen = HashSet::new();
            self.out_edges[v]
                .iter()
                .chain(&self.in_edges[v])
                .all(|&e| seen.insert(&self.edges[e].label))
        })
    }

    /// Distinct edge labels, in first-seen order.
    pub fn labels(&self) -> Vec<Root> {
        let mut out: Vec<Root> = Vec::new();
        for e in &self.edges {
            if !out.contains(&e.label) {
                out.push(e.label.clone());
            }
        }
        out
    }

    /// Graphviz rendering with words as node names and roots as edge labels.
    pub fn to_dot(&self, ball: &Ball) -> String {
        let mut s = String::from("digraph bruhat {\n  rankdir=BT;\n");
        for (i, &v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", ball.format(v)));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  n{} -> n{} [label=\"{}\"];\n",
                e.lower, e.upper, e.label
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Builds the full labelled subgraph on `{y : y <= x}`.
pub fn interval_graph(ball: &Ball, x: ElementId) -> Result<MomentGraph> {
    let vertices = ball.lower_interval(x);
    let lengths: Vec<usize> = vertices.iter().map(|&v| ball.length(v)).collect();
    let position: HashMap<ElementId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = vertices.len();
    let mut edges = Vec::new();
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for lo in 0..n {
        for up in 0..n {
            if lengths[up] <= lengths[lo] || (lengths[up] - lengths[lo]).is_multiple_of(2) {
                continue;
            }
            let t = ball.quotient_matrix(vertices[up], vertices[lo]);
            if !t.is_reflection() {
                continue;
            }
            let label = Root::of_reflection(&t)?;
            out_edges[lo].push(edges.len());
            in_edges[up].push(edges.len());
            edges.push(Edge {
                lower: lo,
                upper: up,
                label,
            });
        }
    }
    let above = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && ball.bruhat_leq(vertices[a], vertices[b]))
                .collect()
        })
        .collect();
    Ok(MomentGraph {
        apex: x,
        vertices,
        lengths,
        edges,
        position,
        out_edges,
        in_edges,
        above,
    })
}
