use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use malachite_nz::integer::Integer;

use super::LaurentPoly;
use crate::coxeter::{Ball, ElementId};
use crate::error::{Error, Result};

/// Which basis the coefficients of a [`HeckeElement`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `T_x`.
    Standard,
    /// `T~_x = v^{l(x)} T_x`.
    Normalized,
}

/// A finite combination of basis elements indexed by ball elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    basis: Basis,
    terms: BTreeMap<ElementId, LaurentPoly>,
}

impl HeckeElement {
    pub fn zero(basis: Basis) -> Self {
        HeckeElement {
            basis,
            terms: BTreeMap::new(),
        }
    }

    /// `p * T_w` (or `p * T~_w`).
    pub fn term(basis: Basis, w: ElementId, p: LaurentPoly) -> Self {
        let mut h = Self::zero(basis);
        h.add_term(w, &p);
        h
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> impl Iterator<Item = (ElementId, &LaurentPoly)> {
        self.terms.iter().map(|(w, p)| (*w, p))
    }

    pub fn coefficient(&self, w: ElementId) -> LaurentPoly {
        self.terms.get(&w).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: ElementId, p: &LaurentPoly) {
        if p.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_default();
        *slot = &*slot + p;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        assert_eq!(self.basis, other.basis, "adding elements in different bases");
        let mut out = self.clone();
        for (w, p) in other.terms() {
            out.add_term(w, p);
        }
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> HeckeElement {
        let mut out = Self::zero(self.basis);
        for (w, p) in self.terms() {
            out.add_term(w, &(p * c));
        }
        out
    }

    /// Rewrites the element in the requested basis.
    pub fn in_basis(&self, basis: Basis, ball: &Ball) -> HeckeElement {
        if basis == self.basis {
            return self.clone();
        }
        let sign = if basis == Basis::Normalized { -1 } else { 1 };
        HeckeElement {
            basis,
            terms: self
                .terms
                .iter()
                .map(|(&w, p)| (w, p.shift(sign * ball.length(w) as i32)))
                .collect(),
        }
    }
}

/// `C'_x` with its coefficients `h_{y,x}` in the normalized basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlElement {
    pub x: ElementId,
    /// `h_{y,x}` for every `y <= x` (zero entries are kept).
    pub h: BTreeMap<ElementId, LaurentPoly>,
    lengths: BTreeMap<ElementId, usize>,
}

impl KlElement {
    pub fn h(&self, y: ElementId) -> LaurentPoly {
        self.h.get(&y).cloned().unwrap_or_default()
    }

    /// Coefficients of `P_{y,x}(q)` from `q^0` upward, where
    /// `P_{y,x}(v^-2) = v^{l(y) - l(x)} h_{y,x}(v)`.
    pub fn p(&self, y: ElementId) -> Vec<Integer> {
        let Some(h) = self.h.get(&y) else {
            return Vec::new();
        };
        if h.is_zero() {
            return Vec::new();
        }
        let gap = (self.lengths[&self.x] - self.lengths[&y]) as i32;
        let mut out: Vec<Integer> = (0..=gap / 2).map(|j| h.coefficient(gap - 2 * j)).collect();
        while out.last().is_some_and(|c| *c == 0u32) {
            out.pop();
        }
        out
    }

    pub fn to_element(&self) -> HeckeElement {
        let mut out = HeckeElement::zero(Basis::Normalized);
        for (&y, p) in &self.h {
            out.add_term(y, p);
        }
        out
    }
}

/// Hecke algebra arithmetic on the elements of a ball, with memoized
/// `d(T_w)` and `C'_x`.
pub struct HeckeAlgebra {
    ball: Arc<Ball>,
    bar_cache: RwLock<HashMap<ElementId, Arc<HeckeElement>>>,
    kl_cache: RwLock<HashMap<ElementId, Arc<KlElement>>>,
}

impl std::fmt::Debug for HeckeAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HeckeAlgebra").field("ball", &self.ball).finish()
    }
}

fn q() -> LaurentPoly {
    LaurentPoly::v(-2)
}

impl HeckeAlgebra {
    pub fn new(ball: Arc<Ball>) -> Self {
        HeckeAlgebra {
            ball,
            bar_cache: RwLock::new(HashMap::new()),
            kl_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn t(&self, w: ElementId) -> HeckeElement {
        HeckeElement::term(Basis::Standard, w, LaurentPoly::one())
    }

    /// `h * T_s`, in the standard basis.
    pub fn mul_generator(&self, h: &HeckeElement, s: usize) -> Result<HeckeElement> {
        let h = h.in_basis(Basis::Standard, &self.ball);
        let mut out = HeckeElement::zero(Basis::Standard);
        for (w, p) in h.terms() {
            let ws = self.ball.mul_right(w, s)?;
            if self.ball.length(ws) > self.ball.length(w) {
                out.add_term(ws, p);
            } else {
                out.add_term(ws, &(p * &q()));
                out.add_term(w, &(p * &(&q() - &LaurentPoly::one())));
            }
        }
        Ok(out)
    }

    /// Product, returned in the basis of `h`.
    pub fn multiply(&self, h: &HeckeElement, g: &HeckeElement) -> Result<HeckeElement> {
        let g = g.in_basis(Basis::Standard, &self.ball);
        let mut out = HeckeElement::zero(Basis::Standard);
        for (y, c) in g.terms() {
            let mut acc = h.in_basis(Basis::Standard, &self.ball);
            for &s in self.ball.word(y) {
                acc = self.mul_generator(&acc, s)?;
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out.in_basis(h.basis(), &self.ball))
    }

    /// `T_s^{-1} = v^2 T_s + (v^2 - 1) T_e`.
    fn inverse_generator(&self, s: usize) -> Result<HeckeElement> {
        let ts = self.ball.mul_right(self.ball.identity(), s)?;
        let mut h = HeckeElement::term(Basis::Standard, ts, LaurentPoly::v(2));
        h.add_term(
            self.ball.identity(),
            &(&LaurentPoly::v(2) - &LaurentPoly::one()),
        );
        Ok(h)
    }

    /// `d(T_w) = T_{w^-1}^{-1}` in the standard basis, by induction on length.
    pub fn bar_of_standard(&self, w: ElementId) -> Result<Arc<HeckeElement>> {
        if let Some(h) = self.bar_cache.read().unwrap().get(&w) {
            return Ok(h.clone());
        }
        let h = match self.ball.word(w).last() {
            None => self.t(w),
            Some(&s) => {
                let prefix = self.ball.mul_right(w, s)?;
                let d = self.bar_of_standard(prefix)?;
                self.multiply(&d, &self.inverse_generator(s)?)?
            }
        };
        let h = Arc::new(h);
        self.bar_cache.write().unwrap().insert(w, h.clone());
        Ok(h)
    }

    /// The ring involution `v -> v^-1`, `T_w -> T_{w^-1}^{-1}`; the result is in
    /// the basis of the input.
    pub fn bar_involution(&self, h: &HeckeElement) -> Result<HeckeElement> {
        let std = h.in_basis(Basis::Standard, &self.ball);
        let mut out = HeckeElement::zero(Basis::Standard);
        for (w, p) in std.terms() {
            out = out.add(&self.bar_of_standard(w)?.scale(&p.bar()));
        }
        Ok(out.in_basis(h.basis(), &self.ball))
    }

    /// `C'_x`: the unique self-dual element `sum_y h_{y,x} T~_y` with
    /// `h_{x,x} = 1` and `h_{y,x} in vZ[v]` for `y < x`.
    ///
    /// Solved top-down: writing `d(T~_y) = sum_z R_{z,y} T~_z`, self-duality
    /// says `h_z - bar(h_z) = sum_{y > z} bar(h_y) R_{z,y}`, and the right side
    /// determines `h_z` as its positive part.
    pub fn kl_basis(&self, x: ElementId) -> Result<Arc<KlElement>> {
        if let Some(k) = self.kl_cache.read().unwrap().get(&x) {
            return Ok(k.clone());
        }
        let ball = &self.ball;
        let mut interval = ball.lower_interval(x);
        interval.reverse();
        // r[y] = d(T~_y) in the normalized basis.
        let mut r: HashMap<ElementId, HeckeElement> = HashMap::new();
        for &y in &interval {
            let d = self
                .bar_of_standard(y)?
                .scale(&LaurentPoly::v(-(ball.length(y) as i32)))
                .in_basis(Basis::Normalized, ball);
            r.insert(y, d);
        }
        let mut h: BTreeMap<ElementId, LaurentPoly> = BTreeMap::new();
        h.insert(x, LaurentPoly::one());
        for &z in interval.iter().skip(1) {
            let mut p = LaurentPoly::zero();
            for (&y, hy) in &h {
                if y != z && !hy.is_zero() {
                    p = &p + &(&hy.bar() * &r[&y].coefficient(z));
                }
            }
            let pos = p.positive_part();
            if !p.coefficient(0).eq(&0u32) || p.negative_part() != -&pos.bar() {
                return Err(Error::Internal(format!(
                    "self-dualization has no solution at {}: {p}",
                    ball.format(z)
                )));
            }
            h.insert(z, pos);
        }
        let lengths = interval.iter().map(|&y| (y, ball.length(y))).collect();
        let k = Arc::new(KlElement { x, h, lengths });
        self.kl_cache.write().unwrap().insert(x, k.clone());
        Ok(k)
    }

    /// Human-readable rendering, e.g. `T~[s1] + v T~[e]`.
    pub fn format(&self, h: &HeckeElement) -> String {
        if h.is_zero() {
            return "0".into();
        }
        let name = match h.basis() {
            Basis::Standard => "T",
            Basis::Normalized => "T~",
        };
        let mut terms: Vec<(ElementId, &LaurentPoly)> = h.terms().collect();
        terms.sort_by_key(|&(w, _)| (std::cmp::Reverse(self.ball.length(w)), w));
        terms
            .iter()
            .map(|(w, p)| format!("({p}) {name}[{}]", self.ball.format(*w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
