use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::S1Complex;
use crate::complex::{
    homology, les_with_labels, ChainComplex, ChainMap, Generator, HomologyResult, LesReport, ShortExactSequence,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `Z[u] ⊗ C` with `∂̃(u^ℓ⊗x) = Σ_{j=0}^{ℓ} u^{ℓ−j}⊗φⱼ(x)`, built in total
/// degrees up to `built_to`.
///
/// Generators are ordered by total degree, then power of `u`, then base
/// index. Homology is exact in degrees below `built_to`.
#[derive(Clone, Debug)]
pub struct EquivariantComplex {
    complex: ChainComplex,
    /// `(ℓ, base index)` per generator.
    labels: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
    built_to: i64,
}

pub(crate) fn power_name(l: usize, base: &str) -> String {
    match l {
        0 => format!("1*{base}"),
        1 => format!("u*{base}"),
        _ => format!("u^{l}*{base}"),
    }
}

impl EquivariantComplex {
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn index(&self, l: usize, base_index: usize) -> Option<usize> {
        self.lookup.get(&(l, base_index)).copied()
    }

    pub fn built_to(&self) -> i64 {
        self.built_to
    }

    /// Highest degree whose homology is not affected by the truncation.
    pub fn exact_to(&self) -> i64 {
        self.built_to - 1
    }

    /// Subcomplex of total degree at most `d`, with matching labels.
    pub fn truncated(&self, d: i64) -> EquivariantComplex {
        let keep: Vec<usize> =
            (0..self.complex.len()).filter(|&i| self.complex.generators()[i].degree <= d).collect();
        let labels: Vec<(usize, usize)> = keep.iter().map(|&i| self.labels[i]).collect();
        let lookup = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        EquivariantComplex { complex: self.complex.permuted(&keep), labels, lookup, built_to: d.min(self.built_to) }
    }

    /// Homology in `lo..=hi`, clipped to the exact range.
    pub fn homology(&self, lo: i64, hi: i64) -> Result<HomologyResult> {
        if hi > self.exact_to() {
            return Err(Error::Invalid(format!(
                "equivariant complex built to degree {} cannot give homology in degree {hi}",
                self.built_to
            )));
        }
        homology(&self.complex, Some((lo, hi)))
    }
}

/// Builds the equivariant complex so that homology is exact through
/// `max_degree` (generators up to `max_degree + 1`).
pub fn equivariant(c: &S1Complex, max_degree: i64) -> Result<EquivariantComplex> {
    if let Some(k) = c.verify_relations()?.first_failure() {
        return Err(Error::Relation(k));
    }
    build(c, max_degree + 1)
}

pub(crate) fn build(c: &S1Complex, built_to: i64) -> Result<EquivariantComplex> {
    let ring = c.ring();
    let base = c.generators();
    let mut generators = Vec::new();
    let mut labels = Vec::new();
    if let Some((min, _)) = c.base().degree_range() {
        for n in min..=built_to {
            let mut l = 0usize;
            while n - 2 * l as i64 >= min {
                let target = n - 2 * l as i64;
                for (i, g) in base.iter().enumerate() {
                    if g.degree == target {
                        generators.push(Generator::new(power_name(l, &g.name), n));
                        labels.push((l, i));
                    }
                }
                l += 1;
            }
        }
    }
    let lookup: HashMap<(usize, usize), usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let phis: Vec<Matrix> = (0..=c.max_index()).map(|i| c.phi(i)).collect();
    let mut d = Matrix::zeros(generators.len(), generators.len());
    for (col, &(l, x)) in labels.iter().enumerate() {
        for (j, phi) in phis.iter().enumerate().take(l + 1) {
            for y in 0..base.len() {
                let v = phi.get(y, x);
                if num_traits::Zero::is_zero(v) {
                    continue;
                }
                let row = lookup[&(l - j, y)];
                d.add_to(row, col, v);
            }
        }
    }
    let complex = ChainComplex::new(ring, generators, d)?;
    Ok(EquivariantComplex { complex, labels, lookup, built_to })
}

/// The Gysin maps `I: C → C̃`, `S: C̃ → C̃` (degree −2) and `B: C̃ → C`
/// (degree +1, `u^ℓ⊗x ↦ φ_{ℓ+1}(x)`), each checked to be a chain map.
#[derive(Clone, Debug)]
pub struct GysinMaps {
    pub i: ChainMap,
    pub s: ChainMap,
    pub b: ChainMap,
}

pub fn gysin_maps(c: &S1Complex, e: &EquivariantComplex) -> Result<GysinMaps> {
    let n = c.len();
    let m = e.complex.len();
    let mut i_mat = Matrix::zeros(m, n);
    for x in 0..n {
        let row = e.index(0, x).ok_or_else(|| {
            Error::Invalid("equivariant complex must be built past the top base degree".into())
        })?;
        i_mat.set(row, x, crate::linalg::rational(1));
    }
    let mut s_mat = Matrix::zeros(m, m);
    let mut b_mat = Matrix::zeros(n, m);
    for (col, &(l, x)) in e.labels.iter().enumerate() {
        if l > 0 {
            let row = e.index(l - 1, x).expect("lower power present");
            s_mat.set(row, col, crate::linalg::rational(1));
        }
        let phi = c.phi(l + 1);
        for y in 0..n {
            b_mat.set(y, col, phi.get(y, x).clone());
        }
    }
    Ok(GysinMaps {
        i: ChainMap::new(c.base().clone(), e.complex.clone(), 0, i_mat)?,
        s: ChainMap::new(e.complex.clone(), e.complex.clone(), -2, s_mat)?,
        b: ChainMap::new(e.complex.clone(), c.base().clone(), 1, b_mat)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectingCheck {
    /// `δ : H_{k−2}(C̃) → H_{k−1}(C)` indexed by `k`.
    pub k: i64,
    pub matches_b: bool,
}

/// Long exact sequence of `0 → C → C̃ → C̃[−2] → 0` plus the comparison of
/// its connecting map with `B`.
#[derive(Clone, Debug)]
pub struct GysinReport {
    pub les: LesReport,
    pub connecting_vs_b: Vec<ConnectingCheck>,
    pub base_homology: HomologyResult,
    pub equivariant_homology: HomologyResult,
}

impl GysinReport {
    pub fn exact(&self) -> bool {
        self.les.is_exact()
    }

    pub fn connecting_is_b(&self) -> bool {
        self.connecting_vs_b.iter().all(|c| c.matches_b)
    }
}

/// Short exact sequence `0 → C → C̃_{≤T} → C̃_{≤T−2}[−2] → 0` and the maps.
pub(crate) struct GysinSes {
    pub ses: ShortExactSequence,
    pub full: EquivariantComplex,
    pub lower: EquivariantComplex,
}

pub(crate) fn gysin_ses(c: &S1Complex, full: EquivariantComplex) -> Result<GysinSes> {
    let t = full.built_to;
    let lower = full.truncated(t - 2);
    let z = lower.complex.shift(-2);
    let maps = gysin_maps(c, &full)?;
    // S as a degree-0 map onto the shifted truncation
    let mut s_mat = Matrix::zeros(lower.complex.len(), full.complex.len());
    for (col, &(l, x)) in full.labels.iter().enumerate() {
        if l > 0 {
            if let Some(row) = lower.index(l - 1, x) {
                s_mat.set(row, col, crate::linalg::rational(1));
            }
        }
    }
    let v = ChainMap::new(full.complex.clone(), z, 0, s_mat)?;
    let ses = ShortExactSequence::new(maps.i, v)?;
    Ok(GysinSes { ses, full, lower })
}

/// Gysin sequence `… → H_k(C) →I H_k(C̃) →S H_{k−2}(C̃) →B H_{k−1}(C) → …`
/// over the degrees `min − 1 ..= max_degree`.
pub fn gysin_les(c: &S1Complex, max_degree: i64) -> Result<GysinReport> {
    if let Some(k) = c.verify_relations()?.first_failure() {
        return Err(Error::Relation(k));
    }
    let (min, top) = c.base().degree_range().unwrap_or((0, 0));
    let max_degree = max_degree.max(min);
    let built_to = max_degree.max(top) + 1;
    let full = build(c, built_to)?;
    let g = gysin_ses(c, full)?;
    let lo = min - 1;
    let les = les_with_labels(&g.ses, Some((lo, max_degree)), ["C", "C~", "C~[-2]"])?;
    let maps = gysin_maps(c, &g.full)?;
    let mut checks = Vec::new();
    let ring = c.ring();
    for (&k, delta) in &les.connecting {
        // H_k(C̃[−2]) has the representatives of H_{k−2}(C̃_{≤T−2}), listed in the same order as in C̃
        let hz = &les.hz[&k];
        let hx = &les.hx[&(k - 1)];
        let b_block = maps.b.block(k - 2);
        let b_induced = hx.reduce(&hx.coords.checked_mul(&b_block.checked_mul(&hz.reps)?)?)?;
        let matches = ring.normalize(&(&b_induced - delta))?.is_zero();
        checks.push(ConnectingCheck { k, matches_b: matches });
    }
    let base_homology = BTreeMap::from_iter(les.hx.iter().map(|(k, h)| (*k, h.clone())));
    let eq_homology = BTreeMap::from_iter(les.hy.iter().map(|(k, h)| (*k, h.clone())));
    Ok(GysinReport {
        les,
        connecting_vs_b: checks,
        base_homology: HomologyResult { ring, groups: base_homology },
        equivariant_homology: HomologyResult { ring, groups: eq_homology },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ring;
    use num_bigint::BigInt;

    fn ck(kappa: i64, ring: Ring) -> S1Complex {
        let base = ChainComplex::free(ring, vec![Generator::new("1", 0), Generator::new("a", 1)]).unwrap();
        S1Complex::new(base, vec![Matrix::from_i64_rows(&[vec![0, 0], vec![kappa, 0]])]).unwrap()
    }

    #[test]
    fn lens_space_pattern() {
        let e = equivariant(&ck(3, Ring::Integers), 8).unwrap();
        let h = e.homology(0, 8).unwrap();
        assert_eq!(h.rank(0), 1);
        for k in 1..=8 {
            assert_eq!(h.rank(k), 0);
            let expected: Vec<BigInt> = if k % 2 == 1 { vec![BigInt::from(3)] } else { vec![] };
            assert_eq!(h.torsion(k), expected, "degree {k}");
        }
    }

    #[test]
    fn b_on_the_circle_model() {
        let c = ck(4, Ring::Integers);
        let e = equivariant(&c, 4).unwrap();
        let maps = gysin_maps(&c, &e).unwrap();
        let one = e.index(0, 0).unwrap();
        assert_eq!(maps.b.matrix().column(one), vec![crate::linalg::rational(0), crate::linalg::rational(4)]);
        let u_one = e.index(1, 0).unwrap();
        assert!(maps.b.matrix().column(u_one).iter().all(num_traits::Zero::is_zero));
        assert_eq!(maps.s.matrix().get(one, u_one), &crate::linalg::rational(1));
    }

    #[test]
    fn gysin_sequence_is_exact_and_connecting_is_b() {
        for ring in [Ring::Integers, Ring::Rationals, Ring::Prime(3)] {
            let r = gysin_les(&ck(3, ring), 9).unwrap();
            assert!(r.exact(), "{ring}");
            assert!(r.connecting_is_b(), "{ring}");
        }
    }
}
