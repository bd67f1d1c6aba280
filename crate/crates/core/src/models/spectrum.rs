use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::complex::{ChainComplex, ChainMap, Generator};
use crate::error::{Error, Result};
use crate::linalg::{rational, Matrix, Ring};
use crate::s1::{EquivariantComplex, S1Complex};

/// One circle of orbits: `γ_M` in degree `μ`, `γ_m` in degree `μ + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub name: String,
    pub degree: i64,
    pub multiplicity: i64,
    pub good: bool,
}

impl Orbit {
    pub fn new(name: impl Into<String>, degree: i64, multiplicity: i64, good: bool) -> Self {
        Orbit { name: name.into(), degree, multiplicity, good }
    }
}

/// Coefficient of `to` in the image of `from`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub from: String,
    pub to: String,
    pub coeff: BigRational,
}

impl SpectrumEntry {
    pub fn new(from: impl Into<String>, to: impl Into<String>, coeff: i64) -> Self {
        SpectrumEntry { from: from.into(), to: to.into(), coeff: rational(coeff) }
    }
}

/// Orbit circles with the differential data of the positive complex.
///
/// `d1`: `∂S_γ` on good circles (`μ` drops by 1). `d2`: `d²γ_M` into good
/// `γ'_m` (`μ` drops by 2). `d1_bad_m`: `d¹γ_m` for bad `γ` into good `γ'_m`
/// (`μ` drops by 1).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrbitSpectrum {
    pub orbits: Vec<Orbit>,
    pub d1: Vec<SpectrumEntry>,
    pub d2: Vec<SpectrumEntry>,
    pub d1_bad_m: Vec<SpectrumEntry>,
}

impl OrbitSpectrum {
    pub fn new(orbits: Vec<Orbit>) -> Self {
        OrbitSpectrum { orbits, ..Default::default() }
    }

    fn lookup(&self) -> Result<HashMap<&str, usize>> {
        let mut map = HashMap::new();
        for (i, o) in self.orbits.iter().enumerate() {
            if map.insert(o.name.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate orbit name `{}`", o.name)));
            }
        }
        Ok(map)
    }

    /// Indices of the good circles, in order.
    pub fn good(&self) -> Vec<usize> {
        (0..self.orbits.len()).filter(|&i| self.orbits[i].good).collect()
    }

    fn resolve(
        &self,
        map: &HashMap<&str, usize>,
        list: &[SpectrumEntry],
        what: &str,
        drop: i64,
        from_good: Option<bool>,
    ) -> Result<Vec<(usize, usize, BigRational)>> {
        let mut out = Vec::with_capacity(list.len());
        for e in list {
            let find = |name: &str| {
                map.get(name).copied().ok_or_else(|| Error::Invalid(format!("{what}: unknown orbit `{name}`")))
            };
            let (f, t) = (find(&e.from)?, find(&e.to)?);
            let (of, ot) = (&self.orbits[f], &self.orbits[t]);
            if let Some(good) = from_good {
                if of.good != good {
                    let kind = if good { "good" } else { "bad" };
                    return Err(Error::Invalid(format!("{what}: source `{}` must be {kind}", of.name)));
                }
            }
            if !ot.good {
                return Err(Error::Invalid(format!("{what}: target `{}` must be good", ot.name)));
            }
            if ot.degree != of.degree - drop {
                return Err(Error::Degree {
                    from: of.name.clone(),
                    to: ot.name.clone(),
                    reason: format!("{what} lowers μ by {drop}"),
                });
            }
            out.push((f, t, e.coeff.clone()));
        }
        Ok(out)
    }

    /// Checks names, multiplicities, entry placement and `∂² = 0`.
    pub fn validate(&self) -> Result<()> {
        self.resolved().map(|_| ())
    }

    fn resolved(&self) -> Result<Resolved> {
        let map = self.lookup()?;
        for o in &self.orbits {
            if o.multiplicity < 1 {
                return Err(Error::Invalid(format!("orbit `{}` has multiplicity {}", o.name, o.multiplicity)));
            }
            if !o.good && o.multiplicity % 2 != 0 {
                return Err(Error::Invalid(format!("bad orbit `{}` must have even multiplicity", o.name)));
            }
        }
        let d1 = self.resolve(&map, &self.d1, "d1", 1, Some(true))?;
        let d2 = self.resolve(&map, &self.d2, "d2", 2, None)?;
        let d1_bad_m = self.resolve(&map, &self.d1_bad_m, "d1_bad_m", 1, Some(false))?;
        let n = self.orbits.len();
        let mut partial = Matrix::zeros(n, n);
        for (f, t, c) in &d1 {
            partial.add_to(*t, *f, c);
        }
        if !(&partial * &partial).is_zero() {
            return Err(Error::Invalid("d1 does not square to zero".into()));
        }
        Ok(Resolved { partial, d2, d1_bad_m })
    }
}

struct Resolved {
    /// `∂` indexed by orbit (row = target).
    partial: Matrix,
    d2: Vec<(usize, usize, BigRational)>,
    d1_bad_m: Vec<(usize, usize, BigRational)>,
}

/// The positive complex with `φ₀ = d⁰ + d¹ + d²` and `φ₁ = Δ`.
///
/// Orbit `i` contributes generators `2i` (`γ_M`) and `2i + 1` (`γ_m`).
#[derive(Clone, Debug)]
pub struct SCPlusComplex {
    pub complex: S1Complex,
    /// Sign in `d¹|_{Cm^good} = ε·∂'`.
    pub epsilon: i64,
    pub d0: Matrix,
    pub d1: Matrix,
    pub d2: Matrix,
}

impl SCPlusComplex {
    pub fn max_generator(orbit: usize) -> usize {
        2 * orbit
    }

    pub fn min_generator(orbit: usize) -> usize {
        2 * orbit + 1
    }
}

/// One generator `S_γ` per good circle with differential `∂`.
#[derive(Clone, Debug)]
pub struct SCInvComplex {
    pub complex: ChainComplex,
    /// Spectrum index of each generator.
    pub orbits: Vec<usize>,
    pub multiplicities: Vec<i64>,
}

impl SCInvComplex {
    /// `Θ(S_γ) = S_γ / κ_γ`.
    pub fn theta(&self) -> Matrix {
        let n = self.orbits.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                BigRational::new(1.into(), self.multiplicities[i].into())
            } else {
                BigRational::zero()
            }
        })
    }

    /// `Θ⁻¹(S_γ) = κ_γ S_γ`.
    pub fn theta_inv(&self) -> Matrix {
        let n = self.orbits.len();
        Matrix::from_fn(n, n, |i, j| if i == j { rational(self.multiplicities[i]) } else { BigRational::zero() })
    }

    /// `∂' = Θ⁻¹∂Θ` as a matrix over `ℚ`.
    pub fn conjugate_matrix(&self) -> Matrix {
        &(&self.theta_inv() * self.complex.differential()) * &self.theta()
    }

    /// `(SC^{+,inv}, ∂')`; fails over `ℤ` when `∂'` is not integral.
    pub fn conjugate(&self) -> Result<ChainComplex> {
        ChainComplex::new(self.complex.ring(), self.complex.generators().to_vec(), self.conjugate_matrix())
    }

    /// `Θ⁻¹ : (SC^{+,inv}, ∂) → (SC^{+,inv}, ∂')`.
    pub fn theta_inv_map(&self) -> Result<ChainMap> {
        ChainMap::new(self.complex.clone(), self.conjugate()?, 0, self.theta_inv())
    }
}

/// Positive complex, invariant complex and the projection data.
#[derive(Clone, Debug)]
pub struct SCModel {
    pub spectrum: OrbitSpectrum,
    pub plus: SCPlusComplex,
    pub inv: SCInvComplex,
}

impl SCModel {
    /// `Π : C̃ → SC^{+,inv}`, `1⊗γ_M ↦ S_γ` for good `γ`, everything else to 0.
    pub fn pi(&self, e: &EquivariantComplex) -> Result<ChainMap> {
        let mut m = Matrix::zeros(self.inv.orbits.len(), e.complex().len());
        for (row, &orbit) in self.inv.orbits.iter().enumerate() {
            if let Some(col) = e.index(0, SCPlusComplex::max_generator(orbit)) {
                m.set(row, col, rational(1));
            }
        }
        ChainMap::new(e.complex().clone(), self.inv.complex.clone(), 0, m)
    }

    /// `p : SC⁺ → SC^{+,inv}`, `γ_M ↦ S_γ` for good `γ`.
    pub fn projection(&self) -> Result<ChainMap> {
        let mut m = Matrix::zeros(self.inv.orbits.len(), self.plus.complex.len());
        for (row, &orbit) in self.inv.orbits.iter().enumerate() {
            m.set(row, SCPlusComplex::max_generator(orbit), rational(1));
        }
        ChainMap::new(self.plus.complex.base().clone(), self.inv.complex.clone(), 0, m)
    }

    /// `i : (SC^{+,inv}, ∂') → SC⁺` of degree +1, `S_γ ↦ γ_m`.
    pub fn inclusion_m(&self) -> Result<ChainMap> {
        let mut m = Matrix::zeros(self.plus.complex.len(), self.inv.orbits.len());
        for (col, &orbit) in self.inv.orbits.iter().enumerate() {
            m.set(SCPlusComplex::min_generator(orbit), col, rational(1));
        }
        ChainMap::new(self.inv.conjugate()?, self.plus.complex.base().clone(), 1, m)
    }
}

fn build_plus(s: &OrbitSpectrum, r: &Resolved, ring: Ring, epsilon: i64) -> Result<SCPlusComplex> {
    let n = s.orbits.len();
    let mut generators = Vec::with_capacity(2 * n);
    for o in &s.orbits {
        generators.push(Generator::new(format!("{}_M", o.name), o.degree));
        generators.push(Generator::new(format!("{}_m", o.name), o.degree + 1));
    }
    let (mx, mn) = (SCPlusComplex::max_generator, SCPlusComplex::min_generator);
    let size = 2 * n;
    let mut d0 = Matrix::zeros(size, size);
    let mut d1 = Matrix::zeros(size, size);
    let mut d2 = Matrix::zeros(size, size);
    let mut delta = Matrix::zeros(size, size);
    let eps = rational(epsilon);
    for (i, o) in s.orbits.iter().enumerate() {
        if o.good {
            delta.set(mn(i), mx(i), rational(o.multiplicity));
        } else {
            d0.set(mx(i), mn(i), rational(2));
        }
    }
    for (t, f, c) in r.partial.nonzero_entries() {
        d1.add_to(mx(t), mx(f), c);
        // ∂'_{t,f} = κ_t/κ_f · ∂_{t,f}
        let ratio = BigRational::new(s.orbits[t].multiplicity.into(), s.orbits[f].multiplicity.into());
        d1.add_to(mn(t), mn(f), &(&(c * &ratio) * &eps));
    }
    for (f, t, c) in &r.d1_bad_m {
        d1.add_to(mn(*t), mn(*f), c);
    }
    for (f, t, c) in &r.d2 {
        d2.add_to(mn(*t), mx(*f), c);
    }
    let d = &(&d0 + &d1) + &d2;
    let base = ChainComplex::new(ring, generators, d)?;
    let complex = S1Complex::new(base, vec![delta])?;
    Ok(SCPlusComplex { complex, epsilon, d0, d1, d2 })
}

/// Builds `SC⁺`, `SC^{+,inv}` and checks every structural constraint. The
/// sign `ε` is the first of `−1, +1` for which the multicomplex relations hold.
pub fn sc_from_spectrum(s: &OrbitSpectrum, ring: Ring) -> Result<SCModel> {
    let r = s.resolved()?;
    let mut last = Error::Relation(1);
    let mut plus = None;
    for eps in [-1, 1] {
        match build_plus(s, &r, ring, eps) {
            Ok(p) => {
                plus = Some(p);
                break;
            }
            Err(e @ (Error::Relation(_) | Error::NotAComplex { .. })) => last = e,
            Err(e) => return Err(e),
        }
    }
    let plus = plus.ok_or(last)?;
    let good = s.good();
    let generators = good.iter().map(|&i| Generator::new(s.orbits[i].name.clone(), s.orbits[i].degree)).collect();
    let partial = r.partial.select(&good, &good);
    let inv = SCInvComplex {
        complex: ChainComplex::new(ring, generators, partial)?,
        multiplicities: good.iter().map(|&i| s.orbits[i].multiplicity).collect(),
        orbits: good,
    };
    let conj = inv.conjugate_matrix();
    let back = &(&inv.theta() * &conj) * &inv.theta_inv();
    if &back != inv.complex.differential() {
        return Err(Error::Invalid("∂' is not conjugate to ∂".into()));
    }
    if !(&conj * &conj).is_zero() {
        return Err(Error::Invalid("∂' does not square to zero".into()));
    }
    Ok(SCModel { spectrum: s.clone(), plus, inv })
}

/// Good circles `μ = n + 1 + 2k ≤ cutoff` with multiplicity `k + 1` and no
/// differentials.
pub fn sphere_spectrum(n: i64, cutoff: i64) -> Result<OrbitSpectrum> {
    if n < 2 {
        return Err(Error::Invalid(format!("sphere spectrum needs n ≥ 2, got {n}")));
    }
    let orbits = (0..)
        .map(|k| (k, n + 1 + 2 * k))
        .take_while(|&(_, mu)| mu <= cutoff)
        .map(|(k, mu)| Orbit::new(format!("g{k}"), mu, k + 1, true))
        .collect();
    Ok(OrbitSpectrum::new(orbits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;
    use crate::s1::equivariant;

    #[test]
    fn single_good_orbit() {
        let s = OrbitSpectrum::new(vec![Orbit::new("g", 5, 1, true)]);
        let m = sc_from_spectrum(&s, Ring::Rationals).unwrap();
        let h = equivariant(&m.plus.complex, 12).unwrap().homology(4, 12).unwrap();
        assert_eq!(h.support(), vec![5]);
        assert_eq!(h.rank(5), 1);
        assert_eq!(homology(&m.inv.complex, None).unwrap().support(), vec![5]);
    }

    #[test]
    fn single_bad_orbit_vanishes_over_q() {
        let s = OrbitSpectrum::new(vec![Orbit::new("b", 5, 2, false)]);
        let m = sc_from_spectrum(&s, Ring::Rationals).unwrap();
        assert!(equivariant(&m.plus.complex, 12).unwrap().homology(4, 12).unwrap().is_zero());
        assert!(m.inv.complex.is_empty());
    }

    #[test]
    fn odd_bad_multiplicity_is_rejected() {
        let s = OrbitSpectrum::new(vec![Orbit::new("b", 5, 3, false)]);
        assert!(sc_from_spectrum(&s, Ring::Rationals).is_err());
    }

    #[test]
    fn epsilon_is_minus_one_with_a_differential() {
        let mut s = OrbitSpectrum::new(vec![Orbit::new("x", 3, 2, true), Orbit::new("y", 2, 1, true)]);
        s.d1.push(SpectrumEntry::new("x", "y", 2));
        let m = sc_from_spectrum(&s, Ring::Integers).unwrap();
        assert_eq!(m.plus.epsilon, -1);
        // ∂' = κ_y/κ_x · 2 = 1
        assert_eq!(m.inv.conjugate_matrix(), Matrix::from_i64_rows(&[vec![0, 0], vec![1, 0]]));
    }

    #[test]
    fn non_integral_conjugate_is_rejected_over_z() {
        let mut s = OrbitSpectrum::new(vec![Orbit::new("x", 3, 2, true), Orbit::new("y", 2, 1, true)]);
        s.d1.push(SpectrumEntry::new("x", "y", 1));
        assert!(matches!(sc_from_spectrum(&s, Ring::Integers), Err(Error::NotRepresentable { .. })));
        assert!(sc_from_spectrum(&s, Ring::Rationals).is_ok());
    }

    #[test]
    fn misplaced_d2_is_rejected() {
        let mut s = OrbitSpectrum::new(vec![Orbit::new("x", 4, 1, true), Orbit::new("y", 3, 1, true)]);
        s.d2.push(SpectrumEntry::new("x", "y", 1));
        assert!(matches!(sc_from_spectrum(&s, Ring::Rationals), Err(Error::Degree { .. })));
    }

    #[test]
    fn sphere_degrees() {
        let s = sphere_spectrum(4, 11).unwrap();
        let degrees: Vec<i64> = s.orbits.iter().map(|o| o.degree).collect();
        assert_eq!(degrees, vec![5, 7, 9, 11]);
        assert_eq!(s.orbits[3].multiplicity, 4);
        assert!(sphere_spectrum(2, 2).unwrap().orbits.is_empty());
        assert!(sphere_spectrum(1, 10).is_err());
    }
}
