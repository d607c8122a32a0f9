use std::fmt;

use crate::exactfield::FieldElement;
use crate::linalg::{self, SparseVec};

/// Small dense square matrix over the exact field, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    dim: usize,
    data: Vec<FieldElement>,
}

impl Mat {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![FieldElement::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = FieldElement::one();
        }
        Mat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.dim + j] = x;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.dim;
        let mut data = vec![FieldElement::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let slot = &mut data[i * n + j];
                        *slot = &*slot + &(a * b);
                    }
                }
            }
        }
        Mat { dim: n, data }
    }

    pub fn minus_identity(&self) -> Mat {
        let mut m = self.clone();
        for i in 0..self.dim {
            let d = m.get(i, i) - &FieldElement::one();
            m.set(i, i, d);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.dim)
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<SparseVec> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .map(|j| (j as u32, self.get(i, j).clone()))
                    .collect()
            })
            .collect();
        linalg::rank(&rows, self.dim)
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.dim).map(|i| self.get(i, j).clone()).collect()
    }

    /// Reflection test in the geometric representation: an involution with
    /// `rank(M - I) = 1`.
    pub fn is_reflection(&self) -> bool {
        !self.is_identity() && self.mul(self).is_identity() && self.minus_identity().rank() == 1
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&FieldElement>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}
