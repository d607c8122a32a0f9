//! Exact laboratory for Kazhdan-Lusztig combinatorics through sheaves on
//! Bruhat moment graphs.
//!
//! The crate builds Braden-MacPherson sheaves for arbitrary Coxeter systems,
//! computes their graded characters in the Hecke algebra, and checks the degree,
//! character, genericity and Hard Lefschetz statements on explicit examples.

#![allow(clippy::needless_range_loop)]

pub mod bmsheaf;
pub mod conjectures;
pub mod coxeter;
pub mod error;
pub mod exactfield;
pub mod gradedlin;
pub mod hecke;
pub mod io;
pub mod linalg;
pub mod par;

pub use error::{Error, Result};
