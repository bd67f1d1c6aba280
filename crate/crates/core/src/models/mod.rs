//! Concrete multicomplexes: circle models, orbit-spectrum complexes, graded
//! formulas and random test corpora.

mod graded;
mod pi;
mod random;
mod spectrum;

pub use graded::{subcritical_sh, tensor_with_bs1, FillingHomology, GradedGroup, GroupSummary};
pub use pi::{mu_filtration_check, verify_pi_iso, DiagramSquare, IntegerCheck, MuFiltrationCheck, PiReport};
pub use random::{
    homotopy_block, random_invariant_pair, random_multicomplex, random_spectrum, BlockKind, RandomParams,
    SpectrumParams,
};
pub use spectrum::{
    sc_from_spectrum, sphere_spectrum, Orbit, OrbitSpectrum, SCInvComplex, SCModel, SCPlusComplex, SpectrumEntry,
};

use serde::Serialize;

use crate::complex::{homology, ChainComplex, Generator};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Ring};
use crate::s1::{equivariant, S1Complex};

/// `Λ(a)` with `|a| = 1`, `φ₁(1) = κa` and all other operations zero.
pub fn model_ck(kappa: i64, ring: Ring) -> Result<S1Complex> {
    if kappa < 1 {
        return Err(Error::Invalid(format!("multiplicity must be at least 1, got {kappa}")));
    }
    let base = ChainComplex::free(ring, vec![Generator::new("1", 0), Generator::new("a", 1)])?;
    S1Complex::new(base, vec![Matrix::from_i64_rows(&[vec![0, 0], vec![kappa, 0]])])
}

/// `Λ(a)` with `φ₀(a) = 2` and `φ_{≥1} = 0`.
pub fn model_cbad(ring: Ring) -> Result<S1Complex> {
    let base = ChainComplex::new(
        ring,
        vec![Generator::new("1", 0), Generator::new("a", 1)],
        Matrix::from_i64_rows(&[vec![0, 2], vec![0, 0]]),
    )?;
    Ok(S1Complex::trivial(base))
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingVerdict {
    pub window: (i64, i64),
    pub base_vanishes: bool,
    pub equivariant_vanishes: bool,
    /// `base_vanishes == equivariant_vanishes`.
    pub holds: bool,
}

/// Compares vanishing of `H(C)` on its support with vanishing of `H^{S¹}(C)`
/// in degrees `min ..= max_degree` (at least `top + 1`), over `ℚ`.
pub fn vanishing_check(c: &S1Complex, max_degree: Option<i64>) -> Result<VanishingVerdict> {
    let c = c.with_ring(Ring::Rationals)?;
    let Some((min, top)) = c.base().degree_range() else {
        return Ok(VanishingVerdict { window: (0, 0), base_vanishes: true, equivariant_vanishes: true, holds: true });
    };
    let hi = max_degree.unwrap_or(top + 1).max(top + 1);
    let base_vanishes = homology(c.base(), None)?.is_zero();
    let equivariant_vanishes = equivariant(&c, hi)?.homology(min, hi)?.is_zero();
    Ok(VanishingVerdict {
        window: (min, hi),
        base_vanishes,
        equivariant_vanishes,
        holds: base_vanishes == equivariant_vanishes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn circle_model_is_mixed() {
        let c = model_ck(5, Ring::Integers).unwrap();
        assert!(c.is_mixed_complex().unwrap());
        assert!(model_ck(0, Ring::Integers).is_err());
        let h = homology(c.base(), None).unwrap();
        assert_eq!((h.rank(0), h.rank(1)), (1, 1));
    }

    #[test]
    fn bad_model_over_each_ring() {
        let q = equivariant(&model_cbad(Ring::Rationals).unwrap(), 10).unwrap().homology(0, 10).unwrap();
        assert!(q.is_zero());
        let z = equivariant(&model_cbad(Ring::Integers).unwrap(), 10).unwrap().homology(0, 10).unwrap();
        for k in 0..=10 {
            let expected: Vec<BigInt> = if k % 2 == 0 { vec![BigInt::from(2)] } else { vec![] };
            assert_eq!(z.torsion(k), expected);
            assert_eq!(z.rank(k), 0);
        }
        let f2 = equivariant(&model_cbad(Ring::Prime(2)).unwrap(), 10).unwrap().homology(0, 10).unwrap();
        assert!((0..=10).all(|k| f2.rank(k) == 1));
    }

    #[test]
    fn vanishing_on_models() {
        let bad = vanishing_check(&model_cbad(Ring::Rationals).unwrap(), None).unwrap();
        assert!(bad.holds && bad.base_vanishes && bad.equivariant_vanishes);
        let ck = vanishing_check(&model_ck(3, Ring::Rationals).unwrap(), None).unwrap();
        assert!(ck.holds && !ck.base_vanishes && !ck.equivariant_vanishes);
    }
}
