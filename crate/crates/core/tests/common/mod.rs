//! Test-only reference implementations, deliberately independent of the
//! library's Bruhat tables and Hecke algebra: Bruhat order by the subword
//! property and Kazhdan–Lusztig polynomials by the classical μ-recursion.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use kl_sheaves::coxeter::{enumerate_ball, Ball, CoxeterSystem, ElementId};

pub fn ball(sys: Arc<CoxeterSystem>, radius: usize) -> Arc<Ball> {
    Arc::new(enumerate_ball(&sys, radius))
}

/// `{y : y <= w}` as all products of subwords of one reduced word of `w`.
pub fn subword_interval(ball: &Ball, w: ElementId) -> HashSet<ElementId> {
    let word = ball.word(w).to_vec();
    let sys = ball.system();
    (0u32..1 << word.len())
        .map(|mask| {
            let sub: Vec<usize> = word
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            ball.lookup(&sys.word_matrix(&sub)).expect("subwords stay in the ball")
        })
        .collect()
}

/// Polynomials in `q`, constant term first, no trailing zeros.
pub type QPoly = Vec<i64>;

fn trim(mut p: QPoly) -> QPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn add_shifted(acc: &mut QPoly, p: &QPoly, shift: usize, c: i64) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (i, a) in p.iter().enumerate() {
        acc[i + shift] += c * a;
    }
}

/// Kazhdan–Lusztig polynomials `P_{y,w}` for every `w` in the ball via
///
/// `P_{x,w} = q^{1-c} P_{sx,v} + q^c P_{x,v} - Σ_z μ(z,v) q^{(l(w)-l(z))/2} P_{x,z}`
///
/// with `w = sv > v`, `c = [sx < x]`, and `z` ranging over `x <= z < v` with
/// `sz < z`.
pub struct MuOracle {
    ball: Arc<Ball>,
    below: HashMap<ElementId, HashSet<ElementId>>,
    p: HashMap<(ElementId, ElementId), QPoly>,
}

impl MuOracle {
    pub fn new(ball: Arc<Ball>) -> Self {
        let mut ids: Vec<ElementId> = ball.ids().collect();
        ids.sort_by_key(|&w| (ball.length(w), w));
        let below = ids.iter().map(|&w| (w, subword_interval(&ball, w))).collect();
        let mut o = MuOracle { ball, below, p: HashMap::new() };
        for w in ids {
            o.fill(w);
        }
        o
    }

    fn len(&self, w: ElementId) -> usize {
        self.ball.length(w)
    }

    pub fn leq(&self, x: ElementId, w: ElementId) -> bool {
        self.below[&w].contains(&x)
    }

    pub fn interval(&self, w: ElementId) -> &HashSet<ElementId> {
        &self.below[&w]
    }

    pub fn p(&self, x: ElementId, w: ElementId) -> QPoly {
        self.p.get(&(x, w)).cloned().unwrap_or_default()
    }

    /// Coefficient of `q^{(l(w)-l(x)-1)/2}` in `P_{x,w}`.
    pub fn mu(&self, x: ElementId, w: ElementId) -> i64 {
        let (lx, lw) = (self.len(x), self.len(w));
        if lx >= lw || (lw - lx) % 2 == 0 || !self.leq(x, w) {
            return 0;
        }
        self.p(x, w).get((lw - lx - 1) / 2).copied().unwrap_or(0)
    }

    fn fill(&mut self, w: ElementId) {
        let b = self.ball.clone();
        if b.length(w) == 0 {
            self.p.insert((w, w), vec![1]);
            return;
        }
        let s = b.word(w)[0];
        let v = b.mul_left(s, w).unwrap();
        let lw = b.length(w);
        let zs: Vec<ElementId> = self.below[&v]
            .iter()
            .copied()
            .filter(|&z| z != v && b.length(b.mul_left(s, z).unwrap()) < b.length(z) && self.mu(z, v) != 0)
            .collect();
        let xs: Vec<ElementId> = self.below[&w].iter().copied().collect();
        for x in xs {
            let sx = b.mul_left(s, x).unwrap();
            let c = usize::from(b.length(sx) < b.length(x));
            let mut acc = Vec::new();
            add_shifted(&mut acc, &self.p(sx, v), 1 - c, 1);
            add_shifted(&mut acc, &self.p(x, v), c, 1);
            for &z in &zs {
                if self.leq(x, z) {
                    let m = self.mu(z, v);
                    add_shifted(&mut acc, &self.p(x, z), (lw - self.len(z)) / 2, -m);
                }
            }
            self.p.insert((x, w), trim(acc));
        }
    }
}
