//! Coxeter systems, their geometric representation, Bruhat order and the
//! labelled Bruhat (moment) graph.

mod ball;
mod graph;
mod matrix;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use ball::{enumerate_ball, Ball, ElementId, GroupElement};
pub use graph::{interval_graph, Edge, MomentGraph, Root};
pub use matrix::Mat;

use crate::error::{Error, Result};
use crate::exactfield::{build_field, validate_coxeter_matrix, FieldElement, FieldSpec, INFINITY};

/// On-disk Coxeter matrix description: `{"generators": [...], "m": [[...]]}`,
/// with `0` standing for an infinite entry.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixFile {
    pub generators: Vec<String>,
    pub m: Vec<Vec<u32>>,
}

#[derive(Debug)]
pub struct CoxeterSystem {
    generators: Vec<String>,
    matrix: Vec<Vec<u32>>,
    field: Arc<FieldSpec>,
    gram: Vec<Vec<FieldElement>>,
    simple: Vec<Mat>,
}

impl PartialEq for CoxeterSystem {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.matrix == other.matrix
    }
}

impl CoxeterSystem {
    /// Builds the system and its geometric representation, verifying the
    /// braid relations on the constructed matrices.
    pub fn new(generators: Vec<String>, matrix: Vec<Vec<u32>>) -> Result<Arc<Self>> {
        validate_coxeter_matrix(&matrix)?;
        if generators.len() != matrix.len() {
            return Err(Error::Validation(format!(
                "{} generator names for a {}x{} matrix",
                generators.len(),
                matrix.len(),
                matrix.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for g in &generators {
            if g.is_empty() || g.contains(char::is_whitespace) || g == "e" {
                return Err(Error::Validation(format!("invalid generator name {g:?}")));
            }
            if !seen.insert(g) {
                return Err(Error::Validation(format!("duplicate generator name {g:?}")));
            }
        }
        let field = build_field(&matrix)?;
        let r = matrix.len();
        let half = FieldElement::from_frac(1, 2);
        let mut gram = vec![vec![FieldElement::zero(); r]; r];
        for s in 0..r {
            for t in 0..r {
                gram[s][t] = if s == t {
                    FieldElement::one()
                } else if matrix[s][t] == INFINITY {
                    FieldElement::from_int(-1)
                } else {
                    -(&field.two_cos_pi_over(matrix[s][t])? * &half)
                };
            }
        }
        // s(a_t) = a_t - 2 B(a_s, a_t) a_s: only row s differs from the identity.
        let simple = (0..r)
            .map(|s| {
                let mut m = Mat::identity(r);
                for t in 0..r {
                    let two_b = &gram[s][t] + &gram[s][t];
                    let entry = if s == t {
                        &FieldElement::one() - &two_b
                    } else {
                        -two_b
                    };
                    m.set(s, t, entry);
                }
                m
            })
            .collect();
        let sys = CoxeterSystem {
            generators,
            matrix,
            field,
            gram,
            simple,
        };
        sys.verify_relations()?;
        Ok(Arc::new(sys))
    }

    /// Default generator names `s1, ..., sr`.
    pub fn from_matrix(matrix: Vec<Vec<u32>>) -> Result<Arc<Self>> {
        let names = (1..=matrix.len()).map(|i| format!("s{i}")).collect();
        Self::new(names, matrix)
    }

    pub fn from_file(file: &MatrixFile) -> Result<Arc<Self>> {
        Self::new(file.generators.clone(), file.m.clone())
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            generators: self.generators.clone(),
            m: self.matrix.clone(),
        }
    }

    /// Type `A_n` (the symmetric group on `n + 1` letters).
    pub fn type_a(n: usize) -> Arc<Self> {
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 1,
                        1 => 3,
                        _ => 2,
                    })
                    .collect()
            })
            .collect();
        Self::from_matrix(m).expect("type A matrix is valid")
    }

    /// Dihedral `I2(m)`; `m = 0` gives the infinite dihedral group.
    pub fn dihedral(m: u32) -> Arc<Self> {
        Self::from_matrix(vec![vec![1, m], vec![m, 1]]).expect("dihedral matrix is valid")
    }

    /// Universal Coxeter system of rank `r` (all `m_st` infinite).
    pub fn universal(r: usize) -> Arc<Self> {
        let m = (0..r)
            .map(|i| (0..r).map(|j| if i == j { 1 } else { INFINITY }).collect())
            .collect();
        Self::from_matrix(m).expect("universal matrix is valid")
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn gram(&self) -> &[Vec<FieldElement>] {
        &self.gram
    }

    pub fn simple_reflection(&self, s: usize) -> &Mat {
        &self.simple[s]
    }

    /// Matrix of the product of simple reflections along `word`.
    pub fn word_matrix(&self, word: &[usize]) -> Mat {
        let mut m = Mat::identity(self.rank());
        for &s in word {
            m = m.mul(&self.simple[s]);
        }
        m
    }

    fn verify_relations(&self) -> Result<()> {
        let r = self.rank();
        let id = Mat::identity(r);
        for s in 0..r {
            if self.simple[s].mul(&self.simple[s]) != id {
                return Err(Error::Internal(format!(
                    "simple reflection {} is not an involution",
                    self.generators[s]
                )));
            }
            for t in s + 1..r {
                let m = self.matrix[s][t];
                if m == INFINITY {
                    continue;
                }
                let st = self.simple[s].mul(&self.simple[t]);
                let mut acc = id.clone();
                for _ in 0..m {
                    acc = acc.mul(&st);
                }
                if acc != id {
                    return Err(Error::Internal(format!(
                        "braid relation (st)^{m} = 1 fails for {}, {}",
                        self.generators[s], self.generators[t]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses a whitespace-separated word of generator names; `e` or the empty
    /// string denote the identity.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Vec::new());
        }
        text.split_whitespace()
            .map(|tok| {
                self.generators
                    .iter()
                    .position(|g| g == tok)
                    .ok_or_else(|| Error::Validation(format!("unknown generator {tok:?}")))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|&s| self.generators[s].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
