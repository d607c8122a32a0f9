//! The Hecke algebra over `Z[v, v^-1]` with `T_s^2 = v^-2 T_e + (v^-2 - 1) T_s`,
//! its bar involution and the Kazhdan–Lusztig basis.

mod algebra;
mod laurent;

pub use algebra::{Basis, HeckeAlgebra, HeckeElement, KlElement};
pub use laurent::LaurentPoly;
