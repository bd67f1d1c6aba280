//! Exact elimination over fields.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};

pub trait Field: Clone + Debug {
    type Elem: Clone + Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    fn to_rational(&self, a: &Self::Elem) -> BigRational;
    fn name(&self) -> String;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn to_rational(&self, a: &BigRational) -> BigRational {
        a.clone()
    }
    fn name(&self) -> String {
        "Q".into()
    }
}

/// The prime field with canonical residues `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        // residues are multiplied as u128, so p must stay below 2^63
        if !is_prime(p) || p >= 1 << 63 {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn reduce_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits")
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in F_{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn from_rational(&self, q: &BigRational) -> Result<u64> {
        let num = self.reduce_int(q.numer());
        let den = self.reduce_int(q.denom());
        if den == 0 {
            return Err(Error::NotRepresentable { value: q.to_string(), ring: self.name() });
        }
        Ok(self.mul(&num, &self.inv(&den)))
    }
    fn to_rational(&self, a: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*a))
    }
    fn name(&self) -> String {
        format!("F{}", self.p)
    }
}

/// Dense matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMatrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon<F: Field> {
    pub matrix: FieldMatrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> FieldMatrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        FieldMatrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rational(field: &F, m: &Matrix) -> Result<Self> {
        let mut out = Self::zeros(field, m.rows(), m.cols());
        for (i, j, v) in m.nonzero_entries() {
            out.set(i, j, field.from_rational(v)?);
        }
        Ok(out)
    }

    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn to_rational(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.field.to_rational(self.get(i, j)))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| self.field.is_zero(v))
    }

    pub fn mul(&self, other: &FieldMatrix<F>) -> FieldMatrix<F> {
        assert_eq!(self.cols, other.rows, "field matrix shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !f.is_zero(b) {
                        let v = f.add(out.get(i, j), &f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                v.iter().enumerate().fold(f.zero(), |acc, (j, x)| {
                    let a = self.get(i, j);
                    if f.is_zero(a) || f.is_zero(x) {
                        acc
                    } else {
                        f.add(&acc, &f.mul(a, x))
                    }
                })
            })
            .collect()
    }

    /// Gauss-Jordan elimination to reduced row echelon form.
    pub fn rref(&self) -> RowEchelon<F> {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !f.is_zero(m.get(i, col))) else { continue };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col));
            for j in col..m.cols {
                let v = f.mul(m.get(row, j), &inv);
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        RowEchelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space, one vector per free column of the echelon form.
    pub fn kernel_basis(&self) -> SubspaceBasis<F> {
        let f = &self.field;
        let RowEchelon { matrix: r, pivots } = self.rref();
        let mut vectors = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            vectors.push(v);
        }
        SubspaceBasis { field: f.clone(), ambient: self.cols, vectors }
    }

    /// Basis of the column space made of the pivot columns of `self`.
    pub fn image_basis(&self) -> SubspaceBasis<F> {
        let pivots = self.rref().pivots;
        SubspaceBasis {
            field: self.field.clone(),
            ambient: self.rows,
            vectors: pivots.iter().map(|&j| self.column(j)).collect(),
        }
    }

    /// Solution of `self * x = b` with free variables set to zero.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows);
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let RowEchelon { matrix: r, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let f = &self.field;
        let mut aug = Self::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        let RowEchelon { matrix: r, pivots } = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] >= n) {
            return None;
        }
        let mut inv = Self::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// Linearly independent vectors in `F^ambient`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<F: Field> {
    pub field: F,
    pub ambient: usize,
    pub vectors: Vec<Vec<F::Elem>>,
}

impl<F: Field> SubspaceBasis<F> {
    pub fn empty(field: &F, ambient: usize) -> Self {
        SubspaceBasis { field: field.clone(), ambient, vectors: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn as_matrix(&self) -> FieldMatrix<F> {
        FieldMatrix::from_columns(&self.field, self.ambient, &self.vectors)
    }

    /// Basis of the sum of two subspaces (independent vectors picked greedily).
    pub fn sum(&self, other: &SubspaceBasis<F>) -> SubspaceBasis<F> {
        let all: Vec<Vec<F::Elem>> = self.vectors.iter().chain(&other.vectors).cloned().collect();
        FieldMatrix::from_columns(&self.field, self.ambient, &all).image_basis()
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.as_matrix().solve(v).is_some()
    }
}

/// A subquotient `sup / sub` with chosen representatives and a coordinate map.
///
/// `coords` is a linear map on the ambient space whose restriction to `sup`
/// vanishes on `sub` and sends `reps[i]` to the `i`-th unit vector.
#[derive(Clone, Debug)]
pub struct Subquotient<F: Field> {
    pub reps: Vec<Vec<F::Elem>>,
    pub coords: FieldMatrix<F>,
}

/// Requires `sub ⊆ sup`. Representatives are the vectors of `sup`, in order,
/// that are independent of `sub` and of the earlier representatives.
pub fn subquotient<F: Field>(sub: &SubspaceBasis<F>, sup: &SubspaceBasis<F>) -> Subquotient<F> {
    let f = &sub.field;
    let n = sub.ambient;
    let mut spanning: Vec<Vec<F::Elem>> = sub.vectors.clone();
    let mut rank = FieldMatrix::from_columns(f, n, &spanning).rank();
    let mut reps = Vec::new();
    for v in &sup.vectors {
        spanning.push(v.clone());
        let r = FieldMatrix::from_columns(f, n, &spanning).rank();
        if r > rank {
            rank = r;
            reps.push(v.clone());
        } else {
            spanning.pop();
        }
    }
    // complete [sub | reps] to a basis of the ambient space with unit vectors
    let mut basis = spanning;
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        basis.push(e);
        if FieldMatrix::from_columns(f, n, &basis).rank() < basis.len() {
            basis.pop();
        }
    }
    let t = FieldMatrix::from_columns(f, n, &basis);
    let t_inv = t.inverse().expect("completed basis is invertible");
    let offset = sub.vectors.len();
    let mut coords = FieldMatrix::zeros(f, reps.len(), n);
    for i in 0..reps.len() {
        for j in 0..n {
            coords.set(i, j, t_inv.get(offset + i, j).clone());
        }
    }
    Subquotient { reps, coords }
}

/// Rank of a rational matrix over the rationals (convenience for tests and reports).
pub fn rank_q(m: &Matrix) -> usize {
    FieldMatrix::from_rational(&Rationals, m).expect("rationals accept everything").rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::rational;

    fn q(rows: &[Vec<i64>]) -> FieldMatrix<Rationals> {
        FieldMatrix::from_rational(&Rationals, &Matrix::from_i64_rows(rows)).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(q(&[vec![1, 2], vec![2, 4]]).rank(), 1);
        let f2 = PrimeField::new(2).unwrap();
        let m = FieldMatrix::from_rational(&f2, &Matrix::from_i64_rows(&[vec![2]])).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(q(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).rank(), 3);
    }

    #[test]
    fn kernels() {
        let k = q(&[vec![1, 2], vec![2, 4]]).kernel_basis();
        assert_eq!(k.vectors, vec![vec![rational(-2), rational(1)]]);
        assert_eq!(q(&[vec![1, 1], vec![0, 1]]).kernel_basis().dim(), 0);
        let z = FieldMatrix::zeros(&Rationals, 2, 3);
        assert_eq!(z.kernel_basis().dim(), 3);
    }

    #[test]
    fn prime_field_arithmetic() {
        assert!(PrimeField::new(4).is_err());
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.inv(&2), 3);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f5.from_rational(&half).unwrap(), 3);
        let f2 = PrimeField::new(2).unwrap();
        assert!(f2.from_rational(&half).is_err());
        assert_eq!(f5.from_rational(&rational(-1)).unwrap(), 4);
    }

    #[test]
    fn solve_and_inverse() {
        let a = q(&[vec![2, 1], vec![1, 1]]);
        let x = a.solve(&[rational(3), rational(2)]).unwrap();
        assert_eq!(x, vec![rational(1), rational(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), FieldMatrix::identity(&Rationals, 2));
        assert!(q(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert!(q(&[vec![1, 2], vec![2, 4]]).solve(&[rational(1), rational(0)]).is_none());
    }

    #[test]
    fn subquotient_coordinates() {
        // sup = F^2, sub = span(e0 + e1)
        let sub = SubspaceBasis { field: Rationals, ambient: 2, vectors: vec![vec![rational(1), rational(1)]] };
        let sup = SubspaceBasis {
            field: Rationals,
            ambient: 2,
            vectors: vec![vec![rational(1), rational(1)], vec![rational(0), rational(1)]],
        };
        let sq = subquotient(&sub, &sup);
        assert_eq!(sq.reps.len(), 1);
        assert_eq!(sq.coords.mul_vec(&[rational(1), rational(1)]), vec![rational(0)]);
        assert_eq!(sq.coords.mul_vec(&sq.reps[0]), vec![rational(1)]);
    }
}
