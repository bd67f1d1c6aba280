//! Multicomplexes (S¹-complexes) and their equivariant homology.

mod equivariant;
mod grid;
mod maps;

pub use equivariant::{equivariant, gysin_les, gysin_maps, EquivariantComplex, GysinMaps, GysinReport};
pub use grid::{quotient, GridReport, GridSquare, QuotientData};
pub use maps::{tilde_homotopy, tilde_map, S1ChainMap, S1Homotopy};

use serde::Serialize;

use crate::complex::{check_degree_rule, ChainComplex, Generator};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Ring};

/// A chain complex `(C, φ₀ = ∂)` with operations `φᵢ` of degree `2i − 1`.
///
/// `phis[0]` is `φ₁`. Trailing operations may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct S1Complex {
    base: ChainComplex,
    phis: Vec<Matrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub k: usize,
    pub holds: bool,
    /// Nonzero entries of `Σ_{i+j=k} φᵢφⱼ`.
    pub defect_entries: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub max_index: usize,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.checks.iter().find(|c| !c.holds).map(|c| c.k)
    }
}

impl S1Complex {
    /// Validates degrees and ring membership, then the multicomplex relations.
    pub fn new(base: ChainComplex, phis: Vec<Matrix>) -> Result<Self> {
        let c = Self::new_unchecked(base, phis)?;
        if let Some(k) = c.verify_relations()?.first_failure() {
            return Err(Error::Relation(k));
        }
        Ok(c)
    }

    /// Validates degrees and ring membership only; the base differential is
    /// not required to square to zero either.
    pub fn new_unchecked(base: ChainComplex, phis: Vec<Matrix>) -> Result<Self> {
        let ring = base.ring();
        let mut normalized = Vec::with_capacity(phis.len());
        for (i, phi) in phis.iter().enumerate() {
            let degree = 2 * (i as i64 + 1) - 1;
            check_degree_rule(phi, base.generators(), base.generators(), degree)?;
            normalized.push(ring.normalize(phi)?);
        }
        while normalized.last().is_some_and(Matrix::is_zero) {
            normalized.pop();
        }
        Ok(S1Complex { base, phis: normalized })
    }

    /// All `φᵢ = 0` for `i ≥ 1`.
    pub fn trivial(base: ChainComplex) -> Self {
        S1Complex { base, phis: Vec::new() }
    }

    pub fn base(&self) -> &ChainComplex {
        &self.base
    }

    pub fn ring(&self) -> Ring {
        self.base.ring()
    }

    pub fn generators(&self) -> &[Generator] {
        self.base.generators()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// `φᵢ`, with `φ₀ = ∂` and zero beyond the stored operations.
    pub fn phi(&self, i: usize) -> Matrix {
        match i {
            0 => self.base.differential().clone(),
            _ => self.phis.get(i - 1).cloned().unwrap_or_else(|| Matrix::zeros(self.len(), self.len())),
        }
    }

    /// Largest `i` with `φᵢ ≠ 0` (0 if only the differential is present).
    pub fn max_index(&self) -> usize {
        self.phis.len()
    }

    pub fn higher(&self) -> &[Matrix] {
        &self.phis
    }

    /// Same data read in another ring.
    pub fn with_ring(&self, ring: Ring) -> Result<Self> {
        Self::new_unchecked(
            ChainComplex::new_unchecked(ring, self.generators().to_vec(), self.base.differential().clone())?,
            self.phis.clone(),
        )
    }

    /// `Σ_{i+j=k} φᵢφⱼ`, normalized in the ring.
    pub fn relation(&self, k: usize) -> Result<Matrix> {
        let n = self.len();
        let mut acc = Matrix::zeros(n, n);
        for i in 0..=k {
            let (a, b) = (self.phi(i), self.phi(k - i));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = &acc + &a.checked_mul(&b)?;
        }
        self.ring().normalize(&acc)
    }

    /// Checks the relations for `k = 0, …, 2·max_index`; higher `k` only
    /// involve zero operations.
    pub fn verify_relations(&self) -> Result<RelationReport> {
        let max_index = self.max_index();
        let mut checks = Vec::new();
        for k in 0..=2 * max_index {
            let defect = self.relation(k)?;
            let entries = defect.nonzero_entries().count();
            checks.push(RelationCheck { k, holds: entries == 0, defect_entries: entries });
        }
        Ok(RelationReport { max_index, checks })
    }

    /// True iff `φⱼ = 0` for `j ≥ 2` and `b = φ₀`, `B = φ₁` satisfy
    /// `b² = B² = bB + Bb = 0`.
    pub fn is_mixed_complex(&self) -> Result<bool> {
        if self.max_index() > 1 {
            return Ok(false);
        }
        Ok((0..=2).all(|k| self.relation(k).map(|m| m.is_zero()).unwrap_or(false)))
    }

    /// Direct sum with generator-name prefixes.
    pub fn direct_sum(&self, other: &S1Complex, prefixes: (&str, &str)) -> Result<Self> {
        let base = self.base.direct_sum(&other.base, prefixes)?;
        let m = self.max_index().max(other.max_index());
        let phis = (1..=m).map(|i| Matrix::block_diagonal(&[&self.phi(i), &other.phi(i)])).collect();
        Self::new_unchecked(base, phis)
    }

    /// Conjugates every `φᵢ` by the degree-preserving change of basis `p`
    /// (new generator `j` is `Σᵢ p[i][j]·old_i`), which must be invertible in the ring.
    pub fn conjugate(&self, p: &Matrix, p_inv: &Matrix) -> Result<Self> {
        let ring = self.ring();
        check_degree_rule(p, self.generators(), self.generators(), 0)?;
        if !ring.mul(p, p_inv)?.eq(&Matrix::identity(self.len())) {
            return Err(Error::Invalid("change of basis is not invertible in the ring".into()));
        }
        let conj = |m: &Matrix| -> Result<Matrix> { ring.normalize(&p_inv.checked_mul(&m.checked_mul(p)?)?) };
        let base = ChainComplex::new_unchecked(ring, self.generators().to_vec(), conj(self.base.differential())?)?;
        let phis = self.phis.iter().map(conj).collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(base, phis)
    }

    /// Generator names shifted by an even degree `2s`.
    pub fn shift_even(&self, s: i64) -> Result<Self> {
        let base = self.base.shift(-2 * s);
        Self::new_unchecked(base, self.phis.clone())
    }

    /// Restriction to the generators `keep` (rows and columns).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let base = self.base.permuted(keep);
        let phis = self.phis.iter().map(|m| m.select(keep, keep)).collect();
        Self::new_unchecked(base, phis)
    }
}
