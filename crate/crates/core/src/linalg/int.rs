//! Integer matrices: column Hermite normal form, Smith normal form, integer
//! solving and integer kernels.
//!
//! HNF convention: `H = M·U` with `U` unimodular, `H` in lower column echelon
//! form. Pivots are positive; entries to the left of a pivot in its row lie
//! in `[0, pivot)`; zero columns come last.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMat{:?}", (0..self.rows).map(|i| self.row(i).to_vec()).collect::<Vec<_>>())
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<BigInt>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            data.extend(r.iter().cloned());
        }
        IntMat { rows: rows.len(), cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMat::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "integer matrix product shape mismatch");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(t, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// col_a ← x·col_a + y·col_b ; col_b ← z·col_a + w·col_b (simultaneously).
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let va = self.get(i, a).clone();
            let vb = self.get(i, b).clone();
            self.set(i, a, x * &va + y * &vb);
            self.set(i, b, z * &va + w * &vb);
        }
    }

    fn combine_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for j in 0..self.cols {
            let va = self.get(a, j).clone();
            let vb = self.get(b, j).clone();
            self.set(a, j, x * &va + y * &vb);
            self.set(b, j, z * &va + w * &vb);
        }
    }

    /// col_dst ← col_dst − q·col_src
    fn axpy_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            self.data[i * self.cols + dst] -= v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c).clone();
            self.set(i, c, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j).clone();
            self.set(r, j, v);
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && det(self).abs().is_one()
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMat) -> BigInt {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap_rows(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(k, k) * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = a.get(k, k).clone();
    }
    sign * a.get(n - 1, n - 1)
}

#[derive(Debug, Clone)]
pub struct HnfResult {
    pub h: IntMat,
    pub u: IntMat,
    /// `(row, col)` of each pivot, in column order.
    pub pivots: Vec<(usize, usize)>,
}

impl HnfResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Column Hermite normal form `H = M·U`.
pub fn hnf(m: &IntMat) -> HnfResult {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.cols);
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..m.rows {
        if c == m.cols {
            break;
        }
        // Gather the gcd of row r (columns c..) into column c.
        for j in c + 1..m.cols {
            if h.get(r, j).is_zero() {
                continue;
            }
            if h.get(r, c).is_zero() {
                h.swap_cols(c, j);
                u.swap_cols(c, j);
                continue;
            }
            let a = h.get(r, c).clone();
            let b = h.get(r, j).clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let z = -(&b / &g);
            let w = &a / &g;
            h.combine_cols(c, j, &x, &y, &z, &w);
            u.combine_cols(c, j, &x, &y, &z, &w);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_col(c);
            u.negate_col(c);
        }
        let piv = h.get(r, c).clone();
        for j in 0..c {
            let q = h.get(r, j).div_floor(&piv);
            if !q.is_zero() {
                h.axpy_col(j, c, &q);
                u.axpy_col(j, c, &q);
            }
        }
        pivots.push((r, c));
        c += 1;
    }
    HnfResult { h, u, pivots }
}

#[derive(Debug, Clone)]
pub struct SnfResult {
    /// Diagonal matrix with `d_1 | d_2 | …`, nonnegative.
    pub d: IntMat,
    /// Row transform (unimodular, rows × rows).
    pub left: IntMat,
    /// Column transform (unimodular, cols × cols).
    pub right: IntMat,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form: `left · M · right = d`.
pub fn snf(m: &IntMat) -> SnfResult {
    let mut d = m.clone();
    let mut left = IntMat::identity(m.rows);
    let mut right = IntMat::identity(m.cols);
    let (rows, cols) = (m.rows, m.cols);
    for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry of the trailing block goes to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = d.get(i, j);
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_snf(d, left, right);
            };
            if bi != t {
                d.swap_rows(bi, t);
                left.swap_rows(bi, t);
            }
            if bj != t {
                d.swap_cols(bj, t);
                right.swap_cols(bj, t);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = d.get(i, t).div_floor(d.get(t, t));
                if !q.is_zero() {
                    let (one, zero) = (BigInt::one(), BigInt::zero());
                    // row_i ← row_i − q·row_t
                    d.combine_rows(t, i, &one, &zero, &-q.clone(), &one);
                    left.combine_rows(t, i, &one, &zero, &-q, &one);
                }
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = d.get(t, j).div_floor(d.get(t, t));
                if !q.is_zero() {
                    d.axpy_col(j, t, &q);
                    right.axpy_col(j, t, &q);
                }
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any offending row into row t and retry.
            let piv = d.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(d.get(i, j) % &piv).is_zero()));
            match bad {
                Some(i) => {
                    let (one, zero) = (BigInt::one(), BigInt::zero());
                    d.combine_rows(t, i, &one, &one, &zero, &one);
                    left.combine_rows(t, i, &one, &one, &zero, &one);
                }
                None => break,
            }
        }
    }
    finish_snf(d, left, right)
}

fn finish_snf(mut d: IntMat, mut left: IntMat, right: IntMat) -> SnfResult {
    for t in 0..d.rows.min(d.cols) {
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
    }
    SnfResult { d, left, right }
}

/// Some integer `c` with `A c = b`, or `None`.
pub fn integer_solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let res = hnf(a);
    let mut y = vec![BigInt::zero(); a.cols];
    for &(r, c) in &res.pivots {
        let mut acc = b[r].clone();
        for (j, yj) in y.iter().enumerate().take(c) {
            acc -= res.h.get(r, j) * yj;
        }
        let (q, rem) = acc.div_rem(res.h.get(r, c));
        if !rem.is_zero() {
            return None;
        }
        y[c] = q;
    }
    if res.h.mul_vec(&y) != b {
        return None;
    }
    Some(res.u.mul_vec(&y))
}

/// ℤ-basis of `{c ∈ ℤ^cols : A c = 0}` read off the HNF transform.
pub fn integer_kernel(a: &IntMat) -> Vec<Vec<BigInt>> {
    let res = hnf(a);
    (res.rank()..a.cols).map(|j| res.u.col(j)).collect()
}

/// ℤ-basis of the integer kernel read off the Smith form: the columns of
/// the right transform past the rank.
pub fn integer_kernel_snf(a: &IntMat) -> Vec<Vec<BigInt>> {
    let res = snf(a);
    (res.rank()..a.cols).map(|j| res.right.col(j)).collect()
}
