//! Spectral sequence of a filtered complex over a field.
//!
//! With `F_p` the span of generators of level `≤ p`,
//! `Z^r_p = {x ∈ F_p : dx ∈ F_{p−r}}` and
//! `E^r_p = Z^r_p / (Z^{r−1}_{p−1} + d Z^{r−1}_{p+r−1})`, with
//! `d^r : E^r_{p,q} → E^r_{p−r,q+r−1}` induced by `d`. Cells are indexed by
//! `(p, q)` with total degree `p + q`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{homology, ChainComplex};
use crate::error::{Error, Result};
use crate::linalg::field::{subquotient, Field, FieldMatrix, PrimeField, Rationals, SubspaceBasis, Subquotient};
use crate::linalg::{Matrix, Ring};
use crate::s1::{equivariant, EquivariantComplex, S1Complex};

/// A complex with a filtration level `≥ 0` per generator; the differential
/// must not raise the level.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: ChainComplex,
    levels: Vec<i64>,
}

impl FilteredComplex {
    pub fn new(complex: ChainComplex, levels: Vec<i64>) -> Result<Self> {
        if !complex.ring().is_field() {
            return Err(Error::Unsupported("spectral sequences are computed over fields only".into()));
        }
        if levels.len() != complex.len() {
            return Err(Error::Dimension(format!("{} levels for {} generators", levels.len(), complex.len())));
        }
        if levels.iter().any(|&l| l < 0) {
            return Err(Error::Invalid("filtration levels must be nonnegative".into()));
        }
        for (i, j, _) in complex.differential().nonzero_entries() {
            if levels[i] > levels[j] {
                return Err(Error::Invalid(format!(
                    "differential raises the filtration from `{}` to `{}`",
                    complex.generators()[j].name,
                    complex.generators()[i].name
                )));
            }
        }
        Ok(FilteredComplex { complex, levels })
    }

    /// The `u`-adic filtration of an equivariant complex, `u^ℓ⊗x` at level `2ℓ`,
    /// so that `E²_{p,q} = H_p(BS¹) ⊗ H_q(C)`.
    pub fn u_filtration(e: &EquivariantComplex) -> Result<Self> {
        let levels = e.labels().iter().map(|&(l, _)| 2 * l as i64).collect();
        Self::new(e.complex().clone(), levels)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    fn level_set(&self) -> BTreeSet<i64> {
        self.levels.iter().copied().collect()
    }
}

/// Page `E^r` on a window: dimensions per `(p, q)` and the matrices of `d^r`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPage {
    pub r: i64,
    pub dims: BTreeMap<(i64, i64), usize>,
    /// `d^r` from cell `(p, q)`, only where the target lies in the window.
    #[serde(skip)]
    pub differentials: BTreeMap<(i64, i64), Matrix>,
}

impl SpectralPage {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Σ_p dim E_{p, n−p}.
    pub fn total(&self, n: i64) -> usize {
        self.dims.iter().filter(|((p, q), _)| p + q == n).map(|(_, d)| d).sum()
    }

    /// Lines `q` carrying a nonzero entry.
    pub fn support_lines(&self) -> BTreeSet<i64> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&(_, q), _)| q).collect()
    }
}

/// Per-degree linear data in a field.
struct Engine<'a, F: Field> {
    field: F,
    fc: &'a FilteredComplex,
}

impl<'a, F: Field> Engine<'a, F> {
    fn degree_levels(&self, n: i64) -> Vec<i64> {
        self.fc.complex.indices(n).iter().map(|&i| self.fc.levels[i]).collect()
    }

    fn boundary(&self, n: i64) -> Result<FieldMatrix<F>> {
        FieldMatrix::from_rational(&self.field, &self.fc.complex.boundary(n))
    }

    /// `{x ∈ F_p C_n : dx ∈ F_{p−r}}`.
    fn z(&self, r: i64, p: i64, n: i64) -> Result<SubspaceBasis<F>> {
        let f = &self.field;
        let lv = self.degree_levels(n);
        let lv_below = self.degree_levels(n - 1);
        let cols: Vec<usize> = (0..lv.len()).filter(|&j| lv[j] <= p).collect();
        let rows: Vec<usize> = (0..lv_below.len()).filter(|&i| lv_below[i] > p - r).collect();
        let d = self.boundary(n)?;
        let mut m = FieldMatrix::zeros(f, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, d.get(i, j).clone());
            }
        }
        let kernel = m.kernel_basis();
        let vectors = kernel
            .vectors
            .iter()
            .map(|v| {
                let mut full = vec![f.zero(); lv.len()];
                for (b, &j) in cols.iter().enumerate() {
                    full[j] = v[b].clone();
                }
                full
            })
            .collect();
        Ok(SubspaceBasis { field: f.clone(), ambient: lv.len(), vectors })
    }

    fn cell(&self, r: i64, p: i64, n: i64) -> Result<Subquotient<F>> {
        let f = &self.field;
        let sup = self.z(r, p, n)?;
        let lower = self.z(r - 1, p - 1, n)?;
        let above = self.z(r - 1, p + r - 1, n + 1)?;
        let d = self.boundary(n + 1)?;
        let boundaries = SubspaceBasis {
            field: f.clone(),
            ambient: sup.ambient,
            vectors: above.vectors.iter().map(|v| d.mul_vec(v)).collect(),
        };
        let sub = lower.sum(&boundaries);
        Ok(subquotient(&sub, &sup))
    }

    /// `(F_p ∩ ker) / (F_{p−1} ∩ ker + F_p ∩ im)` in degree `n`.
    fn infinity_dim(&self, p: i64, n: i64) -> Result<usize> {
        let f = &self.field;
        let lv = self.degree_levels(n);
        let big = lv.iter().copied().max().unwrap_or(0) + 1;
        let cycles_p = self.z(big + p + 1, p, n)?;
        let cycles_prev = self.z(big + p + 1, p - 1, n)?;
        let d = self.boundary(n + 1)?;
        let image = d.image_basis();
        // F_p ∩ im: image vectors supported on levels ≤ p
        let high: Vec<usize> = (0..lv.len()).filter(|&i| lv[i] > p).collect();
        let mut restrict = FieldMatrix::zeros(f, high.len(), image.dim());
        for (c, v) in image.vectors.iter().enumerate() {
            for (a, &i) in high.iter().enumerate() {
                restrict.set(a, c, v[i].clone());
            }
        }
        let coeffs = restrict.kernel_basis();
        let image_mat = image.as_matrix();
        let im_p = SubspaceBasis {
            field: f.clone(),
            ambient: lv.len(),
            vectors: coeffs.vectors.iter().map(|c| image_mat.mul_vec(c)).collect(),
        };
        let sub = cycles_prev.sum(&im_p);
        Ok(subquotient(&sub, &cycles_p).reps.len())
    }

    fn page(&self, r: i64, window: (i64, i64)) -> Result<SpectralPage> {
        let (lo, hi) = window;
        let levels = self.fc.level_set();
        let mut cells = BTreeMap::new();
        for n in lo..=hi {
            for &p in &levels {
                cells.insert((p, n - p), self.cell(r, p, n)?);
            }
        }
        let mut dims = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for (&(p, q), sq) in &cells {
            dims.insert((p, q), sq.reps.len());
            let n = p + q;
            let target_key = (p - r, q + r - 1);
            if n - 1 < lo {
                continue;
            }
            let d = self.boundary(n)?;
            let columns: Vec<Vec<F::Elem>> = match cells.get(&target_key) {
                Some(target) => sq.reps.iter().map(|x| target.coords.mul_vec(&d.mul_vec(x))).collect(),
                // target filtration level carries no generators: the cell is zero
                None => Vec::new(),
            };
            let rows = cells.get(&target_key).map_or(0, |t| t.reps.len());
            let m = if columns.is_empty() {
                Matrix::zeros(rows, sq.reps.len())
            } else {
                FieldMatrix::from_columns(&self.field, rows, &columns).to_rational()
            };
            differentials.insert((p, q), m);
        }
        Ok(SpectralPage { r, dims, differentials })
    }
}

fn with_engine<T>(
    fc: &FilteredComplex,
    q: impl FnOnce(&Engine<Rationals>) -> Result<T>,
    fp: impl FnOnce(&Engine<PrimeField>) -> Result<T>,
) -> Result<T> {
    match fc.complex.ring() {
        Ring::Rationals => q(&Engine { field: Rationals, fc }),
        Ring::Prime(p) => fp(&Engine { field: PrimeField::new(p)?, fc }),
        Ring::Integers => Err(Error::Unsupported("spectral sequences over Z".into())),
    }
}

/// Pages `E^1, …, E^{r_max}` for total degrees in `window`.
pub fn compute_pages(fc: &FilteredComplex, r_max: i64, window: (i64, i64)) -> Result<Vec<SpectralPage>> {
    with_engine(
        fc,
        |e| (1..=r_max).map(|r| e.page(r, window)).collect(),
        |e| (1..=r_max).map(|r| e.page(r, window)).collect(),
    )
}

pub fn compute_page(fc: &FilteredComplex, r: i64, window: (i64, i64)) -> Result<SpectralPage> {
    with_engine(fc, |e| e.page(r, window), |e| e.page(r, window))
}

/// `E^∞` dimensions for total degrees in `window`.
pub fn infinity_page(fc: &FilteredComplex, window: (i64, i64)) -> Result<BTreeMap<(i64, i64), usize>> {
    fn run<F: Field>(e: &Engine<F>, window: (i64, i64)) -> Result<BTreeMap<(i64, i64), usize>> {
        let mut out = BTreeMap::new();
        for n in window.0..=window.1 {
            for &p in &e.fc.level_set() {
                out.insert((p, n - p), e.infinity_dim(p, n)?);
            }
        }
        Ok(out)
    }
    with_engine(fc, |e| run(e, window), |e| run(e, window))
}

/// Internal consistency of a run of pages: `(d^r)² = 0` and
/// `dim E^{r+1} = dim ker d^r − dim im d^r` wherever both neighbours of a
/// cell are inside the window.
pub fn check_pages(pages: &[SpectralPage], window: (i64, i64)) -> Result<bool> {
    let ring = Ring::Rationals;
    for pair in pages.windows(2) {
        let (page, next) = (&pair[0], &pair[1]);
        let r = page.r;
        for (&(p, q), d) in &page.differentials {
            let target = (p - r, q + r - 1);
            if let Some(d2) = page.differentials.get(&target) {
                if !d2.checked_mul(d)?.is_zero() {
                    return Ok(false);
                }
            }
            let n = p + q;
            if n <= window.0 || n >= window.1 {
                continue;
            }
            let incoming = page.differentials.get(&(p + r, q - r + 1));
            let rank_in = match incoming {
                Some(m) => ring.rank(m)?,
                None => 0,
            };
            let expected = page.dim(p, q) - ring.rank(d)? - rank_in;
            if next.dims.contains_key(&(p, q)) && next.dim(p, q) != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Check {
    pub holds: bool,
    /// `(p, q, E² dimension, expected)` where they differ.
    pub mismatches: Vec<(i64, i64, usize, usize)>,
}

/// `E²_{p,q} = [p even]·dim H_q(C)` on the `u`-filtration, total degrees `≤ max_degree`.
pub fn check_e2_gysin(c: &S1Complex, max_degree: i64) -> Result<E2Check> {
    let Some((min, _)) = c.base().degree_range() else {
        return Ok(E2Check { holds: true, mismatches: Vec::new() });
    };
    let e = equivariant(c, max_degree)?;
    let fc = FilteredComplex::u_filtration(&e)?;
    let page = compute_page(&fc, 2, (min, max_degree))?;
    let base = homology(c.base(), None)?;
    let mut mismatches = Vec::new();
    for (&(p, q), &dim) in &page.dims {
        let expected = if p % 2 == 0 { base.rank(q) } else { 0 };
        if dim != expected {
            mismatches.push((p, q, dim, expected));
        }
    }
    Ok(E2Check { holds: mismatches.is_empty(), mismatches })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCheck {
    pub holds: bool,
    /// `(n, Σ_p dim E^∞_{p,n−p}, dim H^{S¹}_n)`.
    pub totals: Vec<(i64, usize, usize)>,
}

/// `Σ_p dim E^∞_{p,n−p} = dim H^{S¹}_n` for `n ≤ max_degree`.
pub fn check_convergence(c: &S1Complex, max_degree: i64) -> Result<ConvergenceCheck> {
    let Some((min, _)) = c.base().degree_range() else {
        return Ok(ConvergenceCheck { holds: true, totals: Vec::new() });
    };
    let e = equivariant(c, max_degree)?;
    let fc = FilteredComplex::u_filtration(&e)?;
    let inf = infinity_page(&fc, (min, max_degree))?;
    let h = e.homology(min, max_degree)?;
    let mut totals = Vec::new();
    for n in min..=max_degree {
        let total = inf.iter().filter(|((p, q), _)| p + q == n).map(|(_, d)| d).sum();
        totals.push((n, total, h.rank(n)));
    }
    Ok(ConvergenceCheck { holds: totals.iter().all(|(_, a, b)| a == b), totals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;

    fn ck(kappa: i64, ring: Ring) -> S1Complex {
        let base = ChainComplex::free(ring, vec![Generator::new("1", 0), Generator::new("a", 1)]).unwrap();
        S1Complex::new(base, vec![Matrix::from_i64_rows(&[vec![0, 0], vec![kappa, 0]])]).unwrap()
    }

    #[test]
    fn circle_model_pages() {
        let c = ck(3, Ring::Rationals);
        let e = equivariant(&c, 8).unwrap();
        let fc = FilteredComplex::u_filtration(&e).unwrap();
        let pages = compute_pages(&fc, 4, (0, 8)).unwrap();
        let e2 = &pages[1];
        for p in (0..=6).step_by(2) {
            assert_eq!(e2.dim(p, 0), 1);
            assert_eq!(e2.dim(p, 1), 1);
        }
        assert_eq!(e2.dim(1, 0), 0);
        // d² : E²_{2,0} → E²_{0,1} is multiplication by 3
        assert_eq!(e2.differentials[&(2, 0)], Matrix::from_i64_rows(&[vec![3]]));
        let e3 = &pages[2];
        assert_eq!(e3.dim(0, 0), 1);
        assert_eq!(e3.total(1), 0);
        assert_eq!(e3.total(4), 0);
        assert!(check_pages(&pages, (0, 8)).unwrap());
        assert!(check_e2_gysin(&c, 8).unwrap().holds);
        assert!(check_convergence(&c, 8).unwrap().holds);
    }

    #[test]
    fn integers_are_rejected() {
        let c = ck(3, Ring::Integers);
        let e = equivariant(&c, 4).unwrap();
        assert!(matches!(FilteredComplex::u_filtration(&e), Err(Error::Unsupported(_))));
    }
}
