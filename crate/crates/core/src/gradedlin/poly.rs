use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::coxeter::Root;
use crate::exactfield::FieldElement;

/// Exponent vector of a monomial in the simple roots `α_1, ..., α_r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u8>);

impl Monomial {
    pub fn one(r: usize) -> Self {
        Monomial(vec![0; r])
    }

    pub fn var(r: usize, i: usize) -> Self {
        let mut m = Self::one(r);
        m.0[i] = 1;
        m
    }

    /// Polynomial degree; the grading degree is twice this.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn times_var(&self, i: usize) -> Monomial {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&e| e == 0) {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "a{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Monomials of a fixed polynomial degree, optionally omitting one variable.
#[derive(Debug)]
pub struct MonomialBasis {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<u32> {
        self.index.get(m).copied()
    }
}

fn generate(r: usize, k: u32, skip: Option<usize>) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u8>, skip: Option<usize>, out: &mut Vec<Monomial>) {
        let r = cur.len();
        if i == r {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        if Some(i) == skip {
            rec(i + 1, left, cur, skip, out);
            return;
        }
        let last_free = (i + 1..r).all(|j| Some(j) == skip);
        let range: Vec<u32> = if last_free {
            vec![left]
        } else {
            (0..=left).rev().collect()
        };
        for e in range {
            cur[i] = e as u8;
            rec(i + 1, left - e, cur, skip, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if r == 0 || (r == 1 && skip == Some(0)) {
        if k == 0 {
            out.push(Monomial::one(r));
        }
        return out;
    }
    rec(0, k, &mut vec![0; r], skip, &mut out);
    out
}

/// Cached basis of the degree-`k` monomials in `r` variables (without the
/// variable `skip`), in descending lexicographic order.
pub fn monomial_basis(r: usize, k: u32, skip: Option<usize>) -> Arc<MonomialBasis> {
    type Cache = Mutex<HashMap<(usize, u32, Option<usize>), Arc<MonomialBasis>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(r, k, skip)) {
        return b.clone();
    }
    let monomials = generate(r, k, skip);
    let index = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i as u32))
        .collect();
    let b = Arc::new(MonomialBasis { monomials, index });
    cache.lock().unwrap().insert((r, k, skip), b.clone());
    b
}

/// A polynomial in `S = k[α_1, ..., α_r]`, stored as monomial coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(r: usize, c: FieldElement) -> Self {
        Self::term(Monomial::one(r), c)
    }

    pub fn term(m: Monomial, c: FieldElement) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    /// The linear form `sum_i coords[i] α_i`.
    pub fn linear(coords: &[FieldElement]) -> Self {
        let r = coords.len();
        let mut p = Self::zero();
        for (i, c) in coords.iter().enumerate() {
            p.add_term(Monomial::var(r, i), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(FieldElement::zero)
    }

    /// Polynomial degree of a homogeneous polynomial (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&FieldElement::from_int(-1)))
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(n, x)| (n.mul(m), x.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                out.add_term(m.mul(n), &(a * b));
            }
        }
        out
    }

    /// Value at a point of `V*` given by the values of the `α_i`.
    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        let mut acc = FieldElement::zero();
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})*{m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The quotient `S -> S/αS` realized by eliminating the pivot variable of `α`
/// (its largest-index nonzero coordinate).
pub struct LinearQuotient {
    root: Root,
    pivot: usize,
    /// `α_p = -(1/a_p) sum_{k != p} a_k α_k` modulo `α`.
    substitute: Poly,
    powers: Mutex<Vec<Poly>>,
}

impl fmt::Debug for LinearQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S/{}", self.root)
    }
}

impl PartialEq for LinearQuotient {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Eq for LinearQuotient {}

impl LinearQuotient {
    pub fn new(root: Root) -> Arc<Self> {
        let pivot = root.pivot();
        let coords = root.coords();
        let r = coords.len();
        let inv = coords[pivot].inverse().expect("pivot is nonzero");
        let mut substitute = Poly::zero();
        for (k, a) in coords.iter().enumerate() {
            if k != pivot {
                substitute.add_term(Monomial::var(r, k), &-(a * &inv));
            }
        }
        Arc::new(LinearQuotient {
            root,
            pivot,
            substitute,
            powers: Mutex::new(vec![Poly::constant(r, FieldElement::one())]),
        })
    }

    pub fn root(&self) -> &Root {
        &self.root
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn rank(&self) -> usize {
        self.root.coords().len()
    }

    fn substitute_power(&self, e: usize) -> Poly {
        let mut powers = self.powers.lock().unwrap();
        while powers.len() <= e {
            let next = powers.last().unwrap().mul(&self.substitute);
            powers.push(next);
        }
        powers[e].clone()
    }

    /// Canonical representative of `m` modulo `α` (no pivot variable).
    pub fn reduce_monomial(&self, m: &Monomial) -> Poly {
        let e = m.0[self.pivot] as usize;
        if e == 0 {
            return Poly::term(m.clone(), FieldElement::one());
        }
        let mut rest = m.clone();
        rest.0[self.pivot] = 0;
        self.substitute_power(e).mul_monomial(&rest)
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            if m.0[self.pivot] == 0 {
                out.add_term(m.clone(), c);
            } else {
                for (n, d) in self.reduce_monomial(m).terms() {
                    out.add_term(n.clone(), &(c * d));
                }
            }
        }
        out
    }
}
