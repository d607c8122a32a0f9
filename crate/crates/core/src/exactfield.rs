//! Exact scalars for the geometric representation.
//!
//! Every Gram value `-cos(pi/m)` lives in the real subfield of the cyclotomic
//! field `Q(zeta)`, where `zeta` is a primitive `2N`-th root of unity and `N` is
//! the least common multiple of the Coxeter matrix entries whose cosine is
//! irrational. Elements are stored in the power basis of `zeta`, reduced modulo
//! the `2N`-th cyclotomic polynomial. When `N = 1` the field is `Q` and every
//! element takes the rational fast path.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use malachite_base::num::arithmetic::traits::Reciprocal;
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use malachite_q::Rational;

use crate::error::{Error, Result};

/// Coxeter matrix entry encoding an infinite order `m_st`.
pub const INFINITY: u32 = 0;

/// The ambient cyclotomic field for one Coxeter matrix.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    conductor: u32,
    modulus: Vec<i64>,
    modulus_q: Vec<Rational>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor
    }
}
impl Eq for FieldSpec {}

impl FieldSpec {
    /// The field `Q` (conductor 1).
    pub fn rational() -> Arc<FieldSpec> {
        Arc::new(Self::with_conductor(1))
    }

    pub fn with_conductor(conductor: u32) -> FieldSpec {
        assert!(conductor >= 1);
        let modulus = cyclotomic_polynomial(2 * conductor as u64);
        let modulus_q = modulus.iter().map(|&c| Rational::from(c)).collect();
        FieldSpec {
            conductor,
            modulus,
            modulus_q,
        }
    }

    /// `N`: the primitive root generating the field has order `2N`.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// `phi(2N)`, the dimension of the field over `Q`.
    pub fn ambient_degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Coefficients of the `2N`-th cyclotomic polynomial, constant term first.
    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    pub fn is_rational(&self) -> bool {
        self.ambient_degree() == 1
    }

    /// Reduces an arbitrary coefficient list (power basis, low degree first)
    /// modulo the cyclotomic polynomial.
    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let deg = self.ambient_degree();
        for top in (deg..coeffs.len()).rev() {
            if coeffs[top] == 0u32 {
                continue;
            }
            let c = std::mem::replace(&mut coeffs[top], Rational::ZERO);
            for j in 0..deg {
                if self.modulus[j] != 0 {
                    let idx = top - deg + j;
                    coeffs[idx] -= &c * &self.modulus_q[j];
                }
            }
        }
        coeffs.truncate(deg);
        coeffs.resize(deg, Rational::ZERO);
        coeffs
    }

    /// `zeta^k` for any integer `k`.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> FieldElement {
        let order = 2 * self.conductor as i64;
        let k = k.rem_euclid(order) as usize;
        let mut coeffs = vec![Rational::ZERO; k + 1];
        coeffs[k] = Rational::ONE;
        FieldElement::from_coeffs(self, self.reduce(coeffs))
            .expect("reduced list has the ambient length")
    }

    /// `2 cos(pi/m)` for a finite `m >= 2` whose value lies in this field.
    pub fn two_cos_pi_over(self: &Arc<Self>, m: u32) -> Result<FieldElement> {
        match m {
            2 => Ok(FieldElement::zero()),
            3 => Ok(FieldElement::one()),
            _ if m >= 2 && self.conductor.is_multiple_of(m) => {
                let k = (self.conductor / m) as i64;
                Ok(&self.zeta_pow(k) + &self.zeta_pow(-k))
            }
            _ => Err(Error::Validation(format!(
                "2cos(pi/{m}) is not in the field of conductor {}",
                self.conductor
            ))),
        }
    }
}

/// Builds the ambient field for a Coxeter matrix (0 encodes infinity).
pub fn build_field(coxeter_matrix: &[Vec<u32>]) -> Result<Arc<FieldSpec>> {
    validate_coxeter_matrix(coxeter_matrix)?;
    let mut conductor = 1u64;
    for (i, row) in coxeter_matrix.iter().enumerate() {
        for &m in &row[i + 1..] {
            if m >= 4 {
                conductor = lcm(conductor, m as u64);
            }
        }
    }
    let conductor = u32::try_from(conductor)
        .map_err(|_| Error::Validation("Coxeter matrix entries too large".into()))?;
    Ok(Arc::new(FieldSpec::with_conductor(conductor)))
}

pub(crate) fn validate_coxeter_matrix(m: &[Vec<u32>]) -> Result<()> {
    let r = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != r {
            return Err(Error::Validation(format!(
                "Coxeter matrix row {i} has length {} (expected {r})",
                row.len()
            )));
        }
        if row[i] != 1 {
            return Err(Error::Validation(format!(
                "diagonal entry ({i},{i}) is {} (expected 1)",
                row[i]
            )));
        }
        for (j, &e) in row.iter().enumerate() {
            if i == j {
                continue;
            }
            if e != m[j][i] {
                return Err(Error::Validation(format!(
                    "Coxeter matrix is not symmetric at ({i},{j})"
                )));
            }
            if e == 1 {
                return Err(Error::Validation(format!(
                    "off-diagonal entry ({i},{j}) is 1"
                )));
            }
        }
    }
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // x^n - 1 divided by every Phi_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = cyclotomic_polynomial(d);
            num = divide_monic(&num, &divisor);
        }
    }
    num
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// Arithmetic operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic: reports division by zero and mismatched fields.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    let spec = a.common_spec(b)?;
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => {
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let _ = spec;
            Ok(a * &b.inverse()?)
        }
    }
}

/// An exact element of `Q(zeta_{2N})`.
///
/// Rational values always use the `Rational` representation regardless of the
/// field they came from, which keeps equality and hashing canonical.
#[derive(Clone)]
pub struct FieldElement(Repr);

#[derive(Clone)]
enum Repr {
    Rational(Rational),
    Cyclotomic(Arc<FieldSpec>, Box<[Rational]>),
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement(Repr::Rational(Rational::ZERO))
    }

    pub fn one() -> Self {
        FieldElement(Repr::Rational(Rational::ONE))
    }

    pub fn from_rational(q: Rational) -> Self {
        FieldElement(Repr::Rational(q))
    }

    pub fn from_int(n: i64) -> Self {
        FieldElement(Repr::Rational(Rational::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        FieldElement(Repr::Rational(Rational::from_signeds(num, den)))
    }

    /// Builds an element from power-basis coordinates.
    pub fn from_coeffs(spec: &Arc<FieldSpec>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != spec.ambient_degree() {
            return Err(Error::Validation(format!(
                "expected {} field coefficients, got {}",
                spec.ambient_degree(),
                coeffs.len()
            )));
        }
        Ok(Self::canonical(spec, coeffs))
    }

    fn canonical(spec: &Arc<FieldSpec>, mut coeffs: Vec<Rational>) -> Self {
        if coeffs[1..].iter().all(|c| *c == 0u32) {
            FieldElement(Repr::Rational(coeffs.swap_remove(0)))
        } else {
            FieldElement(Repr::Cyclotomic(spec.clone(), coeffs.into_boxed_slice()))
        }
    }

    /// Power-basis coordinates in `spec` (length `phi(2N)`).
    pub fn coeffs(&self, spec: &FieldSpec) -> Result<Vec<Rational>> {
        match &self.0 {
            Repr::Rational(q) => {
                let mut v = vec![Rational::ZERO; spec.ambient_degree()];
                v[0] = q.clone();
                Ok(v)
            }
            Repr::Cyclotomic(s, c) => {
                if **s != *spec {
                    return Err(Error::FieldMismatch);
                }
                Ok(c.to_vec())
            }
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Rational(q) => Some(q),
            Repr::Cyclotomic(..) => None,
        }
    }

    pub fn spec(&self) -> Option<&Arc<FieldSpec>> {
        match &self.0 {
            Repr::Rational(_) => None,
            Repr::Cyclotomic(s, _) => Some(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        // Cyclotomic elements are never zero in canonical form.
        matches!(&self.0, Repr::Rational(q) if *q == 0u32)
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rational(q) if *q == 1u32)
    }

    fn common_spec(&self, other: &Self) -> Result<Option<Arc<FieldSpec>>> {
        match (self.spec(), other.spec()) {
            (Some(a), Some(b)) if **a != **b => Err(Error::FieldMismatch),
            (Some(a), _) => Ok(Some(a.clone())),
            (_, Some(b)) => Ok(Some(b.clone())),
            (None, None) => Ok(None),
        }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        match &self.0 {
            Repr::Rational(q) => {
                if *q == 0u32 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(FieldElement(Repr::Rational(q.reciprocal())))
                }
            }
            Repr::Cyclotomic(spec, c) => Ok(cyclotomic_inverse(spec, c)),
        }
    }

    /// Image under `zeta -> zeta^{-1}` (complex conjugation).
    pub fn conjugate(&self) -> FieldElement {
        match &self.0 {
            Repr::Rational(_) => self.clone(),
            Repr::Cyclotomic(spec, c) => {
                let order = 2 * spec.conductor as usize;
                let mut out = vec![Rational::ZERO; order];
                for (k, ck) in c.iter().enumerate() {
                    if *ck != 0u32 {
                        out[(order - k) % order] += ck;
                    }
                }
                Self::canonical(spec, spec.reduce(out))
            }
        }
    }

    /// Whether the element lies in the real subfield.
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Real part as a float: `sum c_k cos(k pi / N)`.
    pub fn approx_f64(&self) -> f64 {
        match &self.0 {
            Repr::Rational(q) => f64::rounding_from(q, RoundingMode::Nearest).0,
            Repr::Cyclotomic(spec, c) => {
                let n = spec.conductor as f64;
                c.iter()
                    .enumerate()
                    .map(|(k, ck)| {
                        let ck = f64::rounding_from(ck, RoundingMode::Nearest).0;
                        ck * (k as f64 * std::f64::consts::PI / n).cos()
                    })
                    .sum()
            }
        }
    }

    /// Sign of a real element. Rational values are exact; irrational values are
    /// nonzero by canonical form, so their float evaluation only has to decide
    /// the side of zero.
    pub fn sign(&self) -> Ordering {
        match &self.0 {
            Repr::Rational(q) => q.partial_cmp(&0u32).expect("rationals are ordered"),
            Repr::Cyclotomic(..) => {
                let v = self.approx_f64();
                if v > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut acc = FieldElement::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

fn cyclotomic_mul(spec: &Arc<FieldSpec>, a: &[Rational], b: &[Rational]) -> FieldElement {
    let mut prod = vec![Rational::ZERO; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0u32 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if *bj != 0u32 {
                prod[i + j] += ai * bj;
            }
        }
    }
    FieldElement::canonical(spec, spec.reduce(prod))
}

/// Solves `b * x = 1` through the multiplication matrix of `b`.
fn cyclotomic_inverse(spec: &Arc<FieldSpec>, b: &[Rational]) -> FieldElement {
    let n = spec.ambient_degree();
    // Column j holds b * zeta^j; augmented with e_0.
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::ZERO; n + 1]; n];
    for j in 0..n {
        let mut shifted = vec![Rational::ZERO; j];
        shifted.extend(b.iter().cloned());
        let col = spec.reduce(shifted);
        for (i, c) in col.into_iter().enumerate() {
            m[i][j] = c;
        }
    }
    m[0][n] = Rational::ONE;
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| m[r][col] != 0u32)
            .expect("cyclotomic field has no zero divisors");
        m.swap(col, piv);
        let inv = (&m[col][col]).reciprocal();
        for k in col..=n {
            m[col][k] *= &inv;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0u32 {
                let f = m[r][col].clone();
                for k in col..=n {
                    let d = &f * &m[col][k];
                    m[r][k] -= d;
                }
            }
        }
    }
    let coeffs = m.into_iter().map(|mut row| row.pop().unwrap()).collect();
    FieldElement::canonical(spec, coeffs)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => a == b,
            (Repr::Cyclotomic(sa, a), Repr::Cyclotomic(sb, b)) => sa == sb && a == b,
            _ => false,
        }
    }
}
impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Rational(q) => {
                0u8.hash(state);
                q.hash(state);
            }
            Repr::Cyclotomic(s, c) => {
                1u8.hash(state);
                s.conductor.hash(state);
                c.hash(state);
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(q) => write!(f, "{q}"),
            Repr::Cyclotomic(_, c) => {
                let mut first = true;
                for (k, ck) in c.iter().enumerate() {
                    if *ck == 0u32 {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{ck}")?,
                        1 => write!(f, "({ck})z")?,
                        _ => write!(f, "({ck})z^{k}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => FieldElement(Repr::Rational(a + b)),
            (Repr::Rational(q), Repr::Cyclotomic(s, c)) | (Repr::Cyclotomic(s, c), Repr::Rational(q)) => {
                let mut v = c.to_vec();
                v[0] += q;
                FieldElement::canonical(s, v)
            }
            (Repr::Cyclotomic(sa, a), Repr::Cyclotomic(sb, b)) => {
                assert!(sa == sb, "field mismatch in addition");
                let v = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                FieldElement::canonical(sa, v)
            }
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => FieldElement(Repr::Rational(a - b)),
            _ => self + &(-rhs),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        match (&self.0, &rhs.0) {
            (Repr::Rational(a), Repr::Rational(b)) => FieldElement(Repr::Rational(a * b)),
            (Repr::Rational(q), Repr::Cyclotomic(s, c)) | (Repr::Cyclotomic(s, c), Repr::Rational(q)) => {
                if *q == 0u32 {
                    return FieldElement::zero();
                }
                let v = c.iter().map(|x| x * q).collect();
                FieldElement::canonical(s, v)
            }
            (Repr::Cyclotomic(sa, a), Repr::Cyclotomic(sb, b)) => {
                assert!(sa == sb, "field mismatch in multiplication");
                cyclotomic_mul(sa, a, b)
            }
        }
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a FieldElement) -> FieldElement {
        self * &rhs.inverse().expect("division by zero")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match &self.0 {
            Repr::Rational(q) => FieldElement(Repr::Rational(-q)),
            Repr::Cyclotomic(s, c) => {
                FieldElement(Repr::Cyclotomic(s.clone(), c.iter().map(|x| -x).collect()))
            }
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self.0 {
            Repr::Rational(q) => FieldElement(Repr::Rational(-q)),
            other => -&FieldElement(other),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

/// Formats a rational as `p` or `p/q`.
pub fn rational_to_string(q: &Rational) -> String {
    q.to_string()
}

pub fn rational_from_str(s: &str) -> Result<Rational> {
    s.parse::<Rational>()
        .map_err(|_| Error::Validation(format!("invalid rational {s:?}")))
}
