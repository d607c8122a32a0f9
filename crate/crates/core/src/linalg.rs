//! Exact sparse Gaussian elimination over [`FieldElement`].
//!
//! Vectors are sorted `(column, value)` lists without stored zeros. Echelon
//! bases keep each pivot row with leading coefficient 1; rows are only reduced
//! at their leading entry, which is enough for membership tests and for
//! back-substitution.

use crate::exactfield::FieldElement;

pub type SparseVec = Vec<(u32, FieldElement)>;

/// Scatters a sparse vector into a dense buffer of length `ncols`.
fn densify(v: &SparseVec, ncols: usize) -> Vec<FieldElement> {
    let mut dense = vec![FieldElement::zero(); ncols];
    for (c, x) in v {
        dense[*c as usize] = x.clone();
    }
    dense
}

fn sparsify(dense: Vec<FieldElement>) -> SparseVec {
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (c as u32, x))
        .collect()
}

pub fn scale(v: &SparseVec, c: &FieldElement) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// `a + c * b`, merged.
pub fn add_scaled(a: &SparseVec, c: &FieldElement, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, &b[j].1 * c));
            j += 1;
        } else {
            let s = &a[i].1 + &(&b[j].1 * c);
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incrementally built row-echelon basis of a subspace of `K^ncols`.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<u32>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }

    /// Reduces `v` against every pivot, left to right.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        if v.is_empty() || self.rows.is_empty() {
            return v.clone();
        }
        let start = v[0].0 as usize;
        let mut dense = densify(v, self.ncols);
        for c in start..self.ncols {
            if dense[c].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot_row[c] {
                let coef = std::mem::replace(&mut dense[c], FieldElement::zero());
                for (j, x) in &self.rows[r as usize][1..] {
                    let d = &coef * x;
                    let slot = &mut dense[*j as usize];
                    *slot = &*slot - &d;
                }
            }
        }
        sparsify(dense)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let red = self.reduce(v);
        self.push_reduced(red)
    }

    fn push_reduced(&mut self, red: SparseVec) -> bool {
        if red.is_empty() {
            return false;
        }
        let lead = red[0].1.clone();
        let row = if lead.is_one() {
            red
        } else {
            scale(&red, &lead.inverse().expect("leading entry is nonzero"))
        };
        self.pivot_row[row[0].0 as usize] = Some(self.rows.len() as u32);
        self.rows.push(row);
        true
    }

    /// Basis of `{x : row . x = 0 for every row}` restricted to columns
    /// `>= from`, using only pivot rows whose leading column is `>= from`.
    /// Vectors are returned in local coordinates (column - from).
    pub fn kernel_from(&self, from: u32) -> Vec<SparseVec> {
        let from_us = from as usize;
        let mut pivot_rows: Vec<&SparseVec> =
            self.rows.iter().filter(|r| r[0].0 >= from).collect();
        pivot_rows.sort_by_key(|r| std::cmp::Reverse(r[0].0));
        let is_pivot: Vec<bool> = (0..self.ncols)
            .map(|c| c >= from_us && self.pivot_row[c].is_some())
            .collect();
        let mut out = Vec::new();
        for free in from_us..self.ncols {
            if is_pivot[free] {
                continue;
            }
            let mut x = vec![FieldElement::zero(); self.ncols];
            x[free] = FieldElement::one();
            for row in &pivot_rows {
                let p = row[0].0 as usize;
                let mut acc = FieldElement::zero();
                for (j, a) in &row[1..] {
                    let xj = &x[*j as usize];
                    if !xj.is_zero() {
                        acc = &acc - &(a * xj);
                    }
                }
                x[p] = acc;
            }
            let local: SparseVec = x
                .into_iter()
                .enumerate()
                .skip(from_us)
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| ((c - from_us) as u32, v))
                .collect();
            out.push(local);
        }
        out
    }

    /// Fully reduced basis (every pivot column cleared in every other row),
    /// sorted by pivot column. Deterministic for a given subspace.
    pub fn reduced_basis(&self) -> Vec<SparseVec> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.rows[i][0].0));
        // Work from the last pivot upward so later rows are already reduced.
        let mut done: Vec<SparseVec> = Vec::with_capacity(self.rows.len());
        let mut tmp = Echelon::new(self.ncols);
        for i in order {
            let row = &self.rows[i];
            let mut dense = densify(row, self.ncols);
            for c in (row[0].0 as usize + 1)..self.ncols {
                if dense[c].is_zero() {
                    continue;
                }
                if let Some(r) = tmp.pivot_row[c] {
                    let coef = std::mem::replace(&mut dense[c], FieldElement::zero());
                    for (j, x) in &tmp.rows[r as usize][1..] {
                        let d = &coef * x;
                        let slot = &mut dense[*j as usize];
                        *slot = &*slot - &d;
                    }
                }
            }
            let red = sparsify(dense);
            tmp.pivot_row[red[0].0 as usize] = Some(tmp.rows.len() as u32);
            tmp.rows.push(red.clone());
            done.push(red);
        }
        done.reverse();
        done
    }
}

/// Basis of the null space of the matrix with the given sparse rows.
pub fn nullspace(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        ech.insert(r);
    }
    ech.kernel_from(0)
}

/// Basis of the projection of `ker(rows)` onto the columns `>= keep_from`.
pub fn project_kernel(rows: &[SparseVec], ncols: usize, keep_from: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        ech.insert(r);
    }
    ech.kernel_from(keep_from as u32)
}

pub fn rank(vectors: &[SparseVec], ncols: usize) -> usize {
    let mut ech = Echelon::new(ncols);
    for v in vectors {
        ech.insert(v);
    }
    ech.rank()
}

/// `dim(A ∩ B)` via `dim A + dim B - dim(A + B)`.
pub fn intersection_dim(a: &[SparseVec], b: &[SparseVec], ncols: usize) -> usize {
    let ra = rank(a, ncols);
    let rb = rank(b, ncols);
    let mut ech = Echelon::new(ncols);
    for v in a.iter().chain(b) {
        ech.insert(v);
    }
    ra + rb - ech.rank()
}

/// Applies a matrix given by sparse columns to a sparse vector.
pub fn apply_columns(columns: &[SparseVec], v: &SparseVec, nrows: usize) -> SparseVec {
    let mut dense = vec![FieldElement::zero(); nrows];
    for (j, x) in v {
        for (i, a) in &columns[*j as usize] {
            let d = a * x;
            let slot = &mut dense[*i as usize];
            *slot = &*slot + &d;
        }
    }
    sparsify(dense)
}

/// Transposes sparse columns into sparse rows.
pub fn transpose(columns: &[SparseVec], nrows: usize) -> Vec<SparseVec> {
    let mut rows: Vec<SparseVec> = vec![Vec::new(); nrows];
    for (j, col) in columns.iter().enumerate() {
        for (i, x) in col {
            rows[*i as usize].push((j as u32, x.clone()));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(u32, i64)]) -> SparseVec {
        entries
            .iter()
            .filter(|(_, x)| *x != 0)
            .map(|&(c, x)| (c, FieldElement::from_int(x)))
            .collect()
    }

    fn dot(a: &SparseVec, b: &SparseVec) -> FieldElement {
        let mut acc = FieldElement::zero();
        for (i, x) in a {
            for (j, y) in b {
                if i == j {
                    acc = &acc + &(x * y);
                }
            }
        }
        acc
    }

    #[test]
    fn kernel_of_small_matrix() {
        // x0 + x1 + x2 = 0, x1 - x2 = 0
        let rows = vec![v(&[(0, 1), (1, 1), (2, 1)]), v(&[(1, 1), (2, -1)])];
        let k = nullspace(&rows, 3);
        assert_eq!(k.len(), 1);
        for r in &rows {
            assert!(dot(r, &k[0]).is_zero());
        }
    }

    #[test]
    fn projection_of_kernel() {
        // x0 = x1, x0 = x2: projection onto {x1, x2} is the line x1 = x2.
        let rows = vec![v(&[(0, 1), (1, -1)]), v(&[(0, 1), (2, -1)])];
        let p = project_kernel(&rows, 3, 1);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0], v(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn membership_and_rank() {
        let mut e = Echelon::new(4);
        assert!(e.insert(&v(&[(1, 2), (3, 1)])));
        assert!(e.insert(&v(&[(0, 1), (1, 1)])));
        assert!(!e.insert(&v(&[(0, 2), (1, 4), (3, 1)])));
        assert!(e.contains(&v(&[(0, 1), (1, 3), (3, 1)])));
        assert!(!e.contains(&v(&[(2, 1)])));
        assert_eq!(e.rank(), 2);
        let rb = e.reduced_basis();
        assert_eq!(rb[0][0].0, 0);
        assert!(rb[0].iter().all(|(c, _)| *c != 1));
    }

    #[test]
    fn intersections() {
        let a = vec![v(&[(0, 1)]), v(&[(1, 1)])];
        let b = vec![v(&[(1, 1), (2, 1)]), v(&[(0, 1), (1, 1)])];
        assert_eq!(intersection_dim(&a, &b, 3), 1);
    }
}
