//! Dense linear algebra over the number field, plus integer lattice tools in
//! [`int`].
//!
//! Elimination is fraction-free in the Bareiss style: every update has the
//! form `(p·a_ij − a_ic·a_rj) / p_prev`, which keeps rational coordinates
//! from blowing up on the small systems this crate produces.

pub mod int;

use std::fmt;

use crate::field::{Field, FieldElem};

pub use int::{hnf, integer_kernel, integer_solve, snf, HnfResult, IntMat, SnfResult};

/// Row-major matrix of field elements.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Mat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<FieldElem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().cloned());
        }
        Mat { field: field.clone(), rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_cols(field: &Field, rows: usize, cols: &[Vec<FieldElem>]) -> Self {
        let mut m = Mat::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.field.zero();
                for t in 0..self.cols {
                    let a = self.get(i, t);
                    if !a.is_zero() {
                        acc = acc + a * other.get(t, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Fraction-free row echelon form. Returns the reduced matrix, the pivot
    /// columns, and the number of row swaps performed.
    pub fn echelon(&self) -> (Mat, Vec<usize>, usize) {
        let mut a = self.clone();
        let mut prev = self.field.one();
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    a.data.swap(p * self.cols + j, r * self.cols + j);
                }
                swaps += 1;
            }
            let piv = a.get(r, c).clone();
            for i in r + 1..self.rows {
                let lead = a.get(i, c).clone();
                for j in c + 1..self.cols {
                    let v = &(&piv * a.get(i, j)) - &(&lead * a.get(r, j));
                    a.set(i, j, &v / &prev);
                }
                a.set(i, c, self.field.zero());
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        (a, pivots, swaps)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> FieldElem {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return self.field.one();
        }
        let (e, pivots, swaps) = self.echelon();
        if pivots.len() < self.rows {
            return self.field.zero();
        }
        // With no skipped columns the last Bareiss pivot is the determinant.
        let d = e.get(self.rows - 1, self.cols - 1).clone();
        if swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Basis of `{x : A x = 0}`; `cols − rank` vectors.
    pub fn nullspace(&self) -> Vec<Vec<FieldElem>> {
        let (e, pivots, _) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![self.field.zero(); self.cols];
                x[f] = self.field.one();
                back_substitute(&e, &pivots, &mut x, None);
                x
            })
            .collect()
    }

    /// Some `x` with `A x = b`, or `None` if the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Mat::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (e, pivots, _) = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        back_substitute(&e, &pivots, &mut x, Some(self.cols));
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![self.field.zero(); n];
            e[j] = self.field.one();
            cols.push(self.solve(&e)?);
        }
        if self.rank() < n {
            return None;
        }
        Some(Mat::from_cols(&self.field, n, &cols))
    }
}

/// Fills the pivot entries of `x` from an echelon matrix, given the free
/// entries. `rhs` names the augmented column, if any.
fn back_substitute(e: &Mat, pivots: &[usize], x: &mut [FieldElem], rhs: Option<usize>) {
    let n = x.len();
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = match rhs {
            Some(c) => e.get(r, c).clone(),
            None => e.field.zero(),
        };
        for j in pc + 1..n {
            let a = e.get(r, j);
            if !a.is_zero() && !x[j].is_zero() {
                acc = &acc - &(a * &x[j]);
            }
        }
        x[pc] = &acc / e.get(r, pc);
    }
}

/// Rank of a list of vectors of common length `dim`.
pub fn rank_of(field: &Field, dim: usize, vectors: &[Vec<FieldElem>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_rows(field, dim, vectors).rank()
}
