use super::equivariant::EquivariantComplex;
use super::S1Complex;
use crate::complex::{check_degree_rule, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `Φ = (Φ₀, Φ₁, …)` with `Φᵢ` of degree `2i` and
/// `Σ_{i+j=k} (Φᵢφⱼ − ψⱼΦᵢ) = 0` for all `k`.
#[derive(Clone, Debug)]
pub struct S1ChainMap {
    pub source: S1Complex,
    pub target: S1Complex,
    pub components: Vec<Matrix>,
}

fn component(list: &[Matrix], i: usize, rows: usize, cols: usize) -> Matrix {
    list.get(i).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols))
}

impl S1ChainMap {
    pub fn new(source: S1Complex, target: S1Complex, components: Vec<Matrix>) -> Result<Self> {
        let ring = source.ring();
        let mut normalized = Vec::with_capacity(components.len());
        for (i, m) in components.iter().enumerate() {
            check_degree_rule(m, source.generators(), target.generators(), 2 * i as i64)?;
            normalized.push(ring.normalize(m)?);
        }
        let map = S1ChainMap { source, target, components: normalized };
        if let Some(k) = map.first_failure()? {
            return Err(Error::NotAChainMap(format!("S1 relation fails at k = {k}")));
        }
        Ok(map)
    }

    pub fn component(&self, i: usize) -> Matrix {
        component(&self.components, i, self.target.len(), self.source.len())
    }

    /// `Σ_{i+j=k} (Φᵢφⱼ − ψⱼΦᵢ)`.
    pub fn defect(&self, k: usize) -> Result<Matrix> {
        let mut acc = Matrix::zeros(self.target.len(), self.source.len());
        for i in 0..=k {
            let f = self.component(i);
            if f.is_zero() {
                continue;
            }
            let j = k - i;
            acc = &acc + &f.checked_mul(&self.source.phi(j))?;
            acc = &acc - &self.target.phi(j).checked_mul(&f)?;
        }
        self.source.ring().normalize(&acc)
    }

    fn horizon(&self) -> usize {
        self.components.len() + self.source.max_index().max(self.target.max_index())
    }

    pub fn first_failure(&self) -> Result<Option<usize>> {
        for k in 0..=self.horizon() {
            if !self.defect(k)?.is_zero() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// `h = (h₀, h₁, …)` with `hᵢ` of degree `2i + 1` and
/// `Φ_k − Ψ_k = Σ_{i+j=k} (hᵢφⱼ + ψⱼhᵢ)`.
#[derive(Clone, Debug)]
pub struct S1Homotopy {
    pub components: Vec<Matrix>,
}

impl S1Homotopy {
    pub fn component(&self, i: usize, rows: usize, cols: usize) -> Matrix {
        component(&self.components, i, rows, cols)
    }

    /// `Σ_{i+j=k} (hᵢφⱼ + ψⱼhᵢ)` for maps `source → target`.
    pub fn boundary(&self, source: &S1Complex, target: &S1Complex, k: usize) -> Result<Matrix> {
        let (rows, cols) = (target.len(), source.len());
        let mut acc = Matrix::zeros(rows, cols);
        for i in 0..=k {
            let h = self.component(i, rows, cols);
            if h.is_zero() {
                continue;
            }
            let j = k - i;
            acc = &acc + &h.checked_mul(&source.phi(j))?;
            acc = &acc + &target.phi(j).checked_mul(&h)?;
        }
        source.ring().normalize(&acc)
    }

    /// Checks `Φ − Ψ = [h, φ]` component by component.
    pub fn connects(&self, phi: &S1ChainMap, psi: &S1ChainMap) -> Result<bool> {
        for (i, m) in self.components.iter().enumerate() {
            check_degree_rule(m, phi.source.generators(), phi.target.generators(), 2 * i as i64 + 1)?;
        }
        let horizon = phi.components.len().max(psi.components.len())
            + self.components.len()
            + phi.source.max_index().max(phi.target.max_index());
        for k in 0..=horizon {
            let diff = &phi.component(k) - &psi.component(k);
            let rhs = self.boundary(&phi.source, &phi.target, k)?;
            if !phi.source.ring().normalize(&(&diff - &rhs))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn tilde_matrix(components: &[Matrix], source: &EquivariantComplex, target: &EquivariantComplex) -> Matrix {
    let mut m = Matrix::zeros(target.complex().len(), source.complex().len());
    for (col, &(l, x)) in source.labels().iter().enumerate() {
        for (i, f) in components.iter().enumerate().take(l + 1) {
            for y in 0..f.rows() {
                let v = f.get(y, x);
                if num_traits::Zero::is_zero(v) {
                    continue;
                }
                if let Some(row) = target.index(l - i, y) {
                    m.add_to(row, col, v);
                }
            }
        }
    }
    m
}

/// `u^ℓ⊗x ↦ Σᵢ u^{ℓ−i}⊗Φᵢ(x)` between equivariant complexes built to the same degree.
pub fn tilde_map(phi: &S1ChainMap, source: &EquivariantComplex, target: &EquivariantComplex) -> Result<ChainMap> {
    if source.built_to() != target.built_to() {
        return Err(Error::Invalid("equivariant complexes must be built to the same degree".into()));
    }
    let m = tilde_matrix(&phi.components, source, target);
    ChainMap::new(source.complex().clone(), target.complex().clone(), 0, m)
}

/// The chain homotopy `u^ℓ⊗x ↦ Σᵢ u^{ℓ−i}⊗hᵢ(x)` (degree +1, not a chain map).
pub fn tilde_homotopy(h: &S1Homotopy, source: &EquivariantComplex, target: &EquivariantComplex) -> Matrix {
    tilde_matrix(&h.components, source, target)
}
