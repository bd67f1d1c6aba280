//! Integer matrices and the Smith normal form.
//!
//! The reduction always pivots on an entry of minimal absolute value in the
//! remaining block, and tracks the unimodular transforms together with their
//! inverses so that kernels, cokernels and integral solutions can be read off
//! directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|row| row.iter().map(|&v| BigInt::from(v))).collect();
        IntegerMatrix { rows: r, cols: c, data }
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Converts a rational matrix whose entries are all integers.
    pub fn try_from_rational(m: &Matrix) -> Result<Self> {
        let mut out = Self::zeros(m.rows(), m.cols());
        for (i, j, v) in m.nonzero_entries() {
            if !v.is_integer() {
                return Err(Error::NotRepresentable { value: v.to_string(), ring: "Z".into() });
            }
            out.set(i, j, v.to_integer());
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| BigRational::from_integer(self.get(i, j).clone()))
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "integer matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigInt::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * q;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let idx = i * self.cols + c;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
    }
}

/// Smith decomposition `U * A * V = D` with the inverses of `U` and `V`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`, all positive.
    pub diagonal: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

struct SnfState {
    d: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.d.add_row_multiple(dst, src, q);
        self.u.add_row_multiple(dst, src, q);
        self.u_inv.add_col_multiple(src, dst, &-q);
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.d.add_col_multiple(dst, src, q);
        self.v.add_col_multiple(dst, src, q);
        self.v_inv.add_row_multiple(src, dst, &-q);
    }

    fn negate_row(&mut self, r: usize) {
        self.d.negate_row(r);
        self.u.negate_row(r);
        self.u_inv.negate_col(r);
    }

    fn min_abs_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.d.rows {
            for j in t..self.d.cols {
                let v = self.d.get(i, j);
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Minimal nonzero entry in row `t` and column `t` beyond the pivot.
    fn min_abs_in_cross(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        let mut consider = |i: usize, j: usize, v: &BigInt| {
            if v.is_zero() {
                return;
            }
            let a = v.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        };
        for i in t..self.d.rows {
            consider(i, t, self.d.get(i, t));
        }
        for j in t + 1..self.d.cols {
            consider(t, j, self.d.get(t, j));
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form over the integers.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut s = SnfState {
        d: a.clone(),
        u: IntegerMatrix::identity(m),
        u_inv: IntegerMatrix::identity(m),
        v: IntegerMatrix::identity(n),
        v_inv: IntegerMatrix::identity(n),
    };
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = s.min_abs_in_block(t) else { break };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let pivot = s.d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = s.d.get(i, t).div_floor(&pivot);
                s.add_row(i, t, &-q);
                clean &= s.d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = s.d.get(t, j).div_floor(&pivot);
                s.add_col(j, t, &-q);
                clean &= s.d.get(t, j).is_zero();
            }
            if !clean {
                // a remainder smaller than the pivot appeared; move it up
                let (i, j) = s.min_abs_in_cross(t).expect("nonzero entry exists");
                s.swap_rows(t, i);
                s.swap_cols(t, j);
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.d.get(i, j).is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.d.get(t, t).is_negative() {
            s.negate_row(t);
        }
        diagonal.push(s.d.get(t, t).clone());
        t += 1;
    }
    SnfResult { d: s.d, u: s.u, v: s.v, u_inv: s.u_inv, v_inv: s.v_inv, diagonal }
}

/// Cokernel `Z^rows / im(A)` as free rank plus invariant factors `> 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelPresentation {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn cokernel_presentation(a: &IntegerMatrix) -> CokernelPresentation {
    let snf = smith_normal_form(a);
    CokernelPresentation {
        free_rank: a.rows - snf.rank(),
        torsion: snf.diagonal.iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// Basis (as columns) of the saturated lattice `{x : A x = 0}`.
pub fn integer_kernel(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let cols: Vec<usize> = (r..a.cols).collect();
    let mut k = IntegerMatrix::zeros(a.cols, cols.len());
    for (jj, &j) in cols.iter().enumerate() {
        for i in 0..a.cols {
            k.set(i, jj, snf.v.get(i, j).clone());
        }
    }
    k
}

/// Some integral solution of `A x = b`, or `None` if there is none.
pub fn solve_integer(a: &IntegerMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_with_snf(&smith_normal_form(a), b)
}

pub fn solve_with_snf(snf: &SnfResult, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = snf.u.mul_vec(b);
    let r = snf.rank();
    if c.iter().skip(r).any(|v| !v.is_zero()) {
        return None;
    }
    let mut y = vec![BigInt::zero(); snf.v.rows()];
    for i in 0..r {
        let (q, rem) = c[i].div_rem(&snf.diagonal[i]);
        if !rem.is_zero() {
            return None;
        }
        y[i] = q;
    }
    Some(snf.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_of_two_by_two() {
        let a = IntegerMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, big(&[2, 4]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntegerMatrix::identity(2));
        assert_eq!(s.v.mul(&s.v_inv), IntegerMatrix::identity(2));
    }

    #[test]
    fn snf_identity_and_zero() {
        let s = smith_normal_form(&IntegerMatrix::identity(3));
        assert_eq!(s.d, IntegerMatrix::identity(3));
        let z = IntegerMatrix::zeros(2, 3);
        let s = smith_normal_form(&z);
        assert!(s.diagonal.is_empty());
        assert!(s.d.is_zero());
    }

    #[test]
    fn snf_repairs_divisibility() {
        // diag(2, 3) must become diag(1, 6)
        let a = IntegerMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, big(&[1, 6]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn cokernels() {
        let one = IntegerMatrix::from_i64_rows(&[vec![2]]);
        assert_eq!(cokernel_presentation(&one), CokernelPresentation { free_rank: 0, torsion: big(&[2]) });
        let zero = IntegerMatrix::zeros(1, 1);
        assert_eq!(cokernel_presentation(&zero), CokernelPresentation { free_rank: 1, torsion: vec![] });
        let a = IntegerMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(cokernel_presentation(&a), CokernelPresentation { free_rank: 0, torsion: big(&[2, 4]) });
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntegerMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        let b = big(&[4, 8]);
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        let two = IntegerMatrix::from_i64_rows(&[vec![2]]);
        assert!(solve_integer(&two, &big(&[3])).is_none());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = IntegerMatrix::from_i64_rows(&[vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]]);
        // 2*(3*-2 - 4*5) - (-1)*(1*-2 - 0) + 0 = -52 - 2
        assert_eq!(a.determinant(), BigInt::from(-54));
    }
}
