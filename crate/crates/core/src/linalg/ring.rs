//! Coefficient rings and the ring-dependent operations on rational-storage matrices.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::field::{subquotient, Field, FieldMatrix, PrimeField, Rationals};
use super::integer::{integer_kernel, smith_normal_form, solve_integer, IntegerMatrix};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Coefficients: `Z`, `Q`, or `F_p`.
///
/// Matrices are always stored with rational entries. Over `F_p` the stored
/// entries are the canonical residues `0..p`; over `Z` they are integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Ring {
    Integers,
    Rationals,
    Prime(u64),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    /// Accepts `Z`, `Q`, `Fp`, `F_p`, `GF(p)` or a bare prime.
    fn from_str(s: &str) -> Result<Ring> {
        let t = s.trim();
        match t {
            "Z" | "ZZ" | "integers" => return Ok(Ring::Integers),
            "Q" | "QQ" | "rationals" => return Ok(Ring::Rationals),
            _ => {}
        }
        let digits = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("F_"))
            .or_else(|| t.strip_prefix('F'))
            .unwrap_or(t);
        let p: u64 = digits.parse().map_err(|_| Error::Parse(format!("unknown ring `{s}`")))?;
        PrimeField::new(p)?;
        Ok(Ring::Prime(p))
    }
}

impl TryFrom<String> for Ring {
    type Error = Error;
    fn try_from(s: String) -> Result<Ring> {
        s.parse()
    }
}

impl From<Ring> for String {
    fn from(r: Ring) -> String {
        r.to_string()
    }
}

/// Homology of `C_{k+1} --d_in--> C_k --d_out--> C_{k-1}` at `C_k`.
///
/// Column `i` of `reps` is a cycle representing the `i`-th generator, whose
/// order is `orders[i]` (`0` for a free summand). `coords` sends a cycle to
/// its class in these generators; apply [`Ring::reduce_coords`] afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyData {
    pub orders: Vec<BigInt>,
    pub reps: Matrix,
    pub coords: Matrix,
}

fn prime_field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("ring holds a prime")
}

fn from_field<F: Field>(field: &F, columns: &[Vec<F::Elem>], rows: usize) -> Matrix {
    let cols: Vec<Vec<BigRational>> =
        columns.iter().map(|c| c.iter().map(|x| field.to_rational(x)).collect()).collect();
    Matrix::from_columns(rows, &cols)
}

impl Ring {
    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Ring::Prime(p) => *p,
            _ => 0,
        }
    }

    pub fn normalize_scalar(&self, q: &BigRational) -> Result<BigRational> {
        match self {
            Ring::Rationals => Ok(q.clone()),
            Ring::Integers => {
                if q.is_integer() {
                    Ok(q.clone())
                } else {
                    Err(Error::NotRepresentable { value: q.to_string(), ring: self.to_string() })
                }
            }
            Ring::Prime(p) => {
                let f = prime_field(*p);
                f.from_rational(q).map(|x| f.to_rational(&x))
            }
        }
    }

    /// Maps every entry into the ring's canonical representatives.
    pub fn normalize(&self, m: &Matrix) -> Result<Matrix> {
        if let Ring::Rationals = self {
            return Ok(m.clone());
        }
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for (i, j, v) in m.nonzero_entries() {
            out.set(i, j, self.normalize_scalar(v)?);
        }
        Ok(out)
    }

    /// True when the matrix vanishes in the ring.
    pub fn is_zero(&self, m: &Matrix) -> Result<bool> {
        Ok(self.normalize(m)?.is_zero())
    }

    pub fn mul(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        self.normalize(&a.checked_mul(b)?)
    }

    /// Rank over the ring's fraction field (over `Z` this is the rational rank).
    pub fn rank(&self, m: &Matrix) -> Result<usize> {
        match self {
            Ring::Integers | Ring::Rationals => Ok(FieldMatrix::from_rational(&Rationals, m)?.rank()),
            Ring::Prime(p) => Ok(FieldMatrix::from_rational(&prime_field(*p), m)?.rank()),
        }
    }

    /// Columns spanning `ker m`; over `Z` a basis of the integral kernel lattice.
    pub fn kernel(&self, m: &Matrix) -> Result<Matrix> {
        match self {
            Ring::Integers => Ok(integer_kernel(&IntegerMatrix::try_from_rational(m)?).to_rational()),
            Ring::Rationals => {
                let k = FieldMatrix::from_rational(&Rationals, m)?.kernel_basis();
                Ok(from_field(&Rationals, &k.vectors, m.cols()))
            }
            Ring::Prime(p) => {
                let f = prime_field(*p);
                let k = FieldMatrix::from_rational(&f, m)?.kernel_basis();
                Ok(from_field(&f, &k.vectors, m.cols()))
            }
        }
    }

    /// Some solution of `m x = b` in the ring, or `None`.
    pub fn solve(&self, m: &Matrix, b: &[BigRational]) -> Result<Option<Vec<BigRational>>> {
        match self {
            Ring::Integers => {
                let a = IntegerMatrix::try_from_rational(m)?;
                let mut rhs = Vec::with_capacity(b.len());
                for v in b {
                    if !v.is_integer() {
                        return Err(Error::NotRepresentable { value: v.to_string(), ring: self.to_string() });
                    }
                    rhs.push(v.to_integer());
                }
                Ok(solve_integer(&a, &rhs).map(|x| x.into_iter().map(BigRational::from_integer).collect()))
            }
            Ring::Rationals => Ok(FieldMatrix::from_rational(&Rationals, m)?.solve(b)),
            Ring::Prime(p) => {
                let f = prime_field(*p);
                let rhs: Vec<u64> = b.iter().map(|v| f.from_rational(v)).collect::<Result<_>>()?;
                Ok(FieldMatrix::from_rational(&f, m)?
                    .solve(&rhs)
                    .map(|x| x.iter().map(|e| f.to_rational(e)).collect()))
            }
        }
    }

    /// Reduces class coordinates: row `i` modulo `orders[i]` over `Z`,
    /// everything modulo `p` over `F_p`.
    pub fn reduce_coords(&self, m: &Matrix, orders: &[BigInt]) -> Result<Matrix> {
        assert_eq!(m.rows(), orders.len(), "one order per coordinate row");
        match self {
            Ring::Integers => {
                let mut out = self.normalize(m)?;
                for (i, ord) in orders.iter().enumerate() {
                    if ord.is_zero() {
                        continue;
                    }
                    for j in 0..m.cols() {
                        let v = out.get(i, j).to_integer().mod_floor(ord);
                        out.set(i, j, BigRational::from_integer(v));
                    }
                }
                Ok(out)
            }
            _ => self.normalize(m),
        }
    }

    /// Homology at the middle of `d_out ∘ d_in`, which must vanish in the ring.
    pub fn homology(&self, d_out: &Matrix, d_in: &Matrix) -> Result<HomologyData> {
        let n = d_out.cols();
        if d_in.rows() != n {
            return Err(Error::Dimension(format!(
                "incoming differential has {} rows, outgoing has {} columns",
                d_in.rows(),
                n
            )));
        }
        match self {
            Ring::Integers => integer_homology(d_out, d_in),
            Ring::Rationals => Ok(field_homology(&Rationals, d_out, d_in)?),
            Ring::Prime(p) => Ok(field_homology(&prime_field(*p), d_out, d_in)?),
        }
    }
}

fn field_homology<F: Field>(field: &F, d_out: &Matrix, d_in: &Matrix) -> Result<HomologyData> {
    let n = d_out.cols();
    let cycles = FieldMatrix::from_rational(field, d_out)?.kernel_basis();
    let boundaries = FieldMatrix::from_rational(field, d_in)?.image_basis();
    let sq = subquotient(&boundaries, &cycles);
    Ok(HomologyData {
        orders: vec![BigInt::zero(); sq.reps.len()],
        reps: from_field(field, &sq.reps, n),
        coords: sq.coords.to_rational(),
    })
}

fn integer_homology(d_out: &Matrix, d_in: &Matrix) -> Result<HomologyData> {
    let n = d_out.cols();
    let a = IntegerMatrix::try_from_rational(d_out)?;
    let b = IntegerMatrix::try_from_rational(d_in)?;
    let snf = smith_normal_form(&a);
    let r = snf.rank();
    let k = n - r;
    // kernel basis K = V[:, r..]; cycles x = K y with y = (V^-1 x)[r..]
    let mut proj = IntegerMatrix::zeros(k, n);
    for i in 0..k {
        for j in 0..n {
            proj.set(i, j, snf.v_inv.get(r + i, j).clone());
        }
    }
    let relations = proj.mul(&b);
    let inner = smith_normal_form(&relations);
    let mut orders = Vec::new();
    let mut selected = Vec::new();
    for i in 0..k {
        let d = inner.diagonal.get(i).cloned().unwrap_or_else(BigInt::zero);
        if !d.is_one() {
            selected.push(i);
            orders.push(d);
        }
    }
    let mut kernel = IntegerMatrix::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            kernel.set(i, j, snf.v.get(i, r + j).clone());
        }
    }
    let gens = kernel.mul(&inner.u_inv).to_rational().select_cols(&selected);
    let coords = inner.u.mul(&proj).to_rational().select_rows(&selected);
    Ok(HomologyData { orders, reps: gens, coords })
}
