use proptest::prelude::*;

use s1chains::complex::homology;
use s1chains::io::SpectrumFile;
use s1chains::linalg::Ring;
use s1chains::models::{
    model_ck, random_invariant_pair, random_spectrum, sc_from_spectrum, sphere_spectrum, verify_pi_iso, Orbit,
    OrbitSpectrum, RandomParams, SpectrumEntry, SpectrumParams,
};
use s1chains::s1::{equivariant, quotient};
use s1chains::Error;

fn small_spectra() -> SpectrumParams {
    SpectrumParams { max_circles: 8, max_kappa: 4, max_degree: 6 }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn random_spectra_validate_and_build(seed in 0u64..10_000) {
        let s = random_spectrum(seed, &small_spectra());
        prop_assert!(s.validate().is_ok());
        let m = sc_from_spectrum(&s, Ring::Rationals).unwrap();
        prop_assert!(m.plus.complex.verify_relations().unwrap().holds());
        let conj = m.inv.conjugate().unwrap();
        let lo = s.orbits.iter().map(|o| o.degree).min().unwrap_or(0);
        let hi = s.orbits.iter().map(|o| o.degree).max().unwrap_or(0) + 1;
        let a = homology(&m.inv.complex, Some((lo, hi))).unwrap();
        let b = homology(&conj, Some((lo, hi))).unwrap();
        for k in lo..=hi {
            prop_assert_eq!(a.rank(k), b.rank(k));
        }
    }

    #[test]
    fn pi_is_a_rational_quasi_isomorphism(seed in 0u64..10_000) {
        let s = random_spectrum(seed, &small_spectra());
        let r = verify_pi_iso(&s, None).unwrap();
        prop_assert!(r.chain_map);
        prop_assert!(r.quasi_isomorphism, "failing degrees {:?}", r.failing_degrees);
        prop_assert!(r.squares_hold());
    }

    #[test]
    fn spectrum_files_round_trip(seed in 0u64..10_000) {
        let s = random_spectrum(seed, &small_spectra());
        let text = serde_json::to_string(&SpectrumFile::from_spectrum(&s)).unwrap();
        let back: SpectrumFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_spectrum().unwrap(), s);
    }

    #[test]
    fn invariant_pairs_give_commuting_grids(seed in 0u64..10_000) {
        let (c, sub) = random_invariant_pair(seed, &RandomParams { max_generators: 12, ..RandomParams::default() }).unwrap();
        let q = quotient(&c.with_ring(Ring::Rationals).unwrap(), &sub, 7).unwrap();
        prop_assert!(q.grid.all_hold(), "{:?}", q.grid.failures());
    }
}

#[test]
fn sphere_equivariant_ranks_over_z() {
    let s = sphere_spectrum(3, 14).unwrap();
    let m = sc_from_spectrum(&s, Ring::Integers).unwrap();
    let h = equivariant(&m.plus.complex, 14).unwrap().homology(0, 14).unwrap();
    // the sphere spectrum has ∂ = 0, so the model exists over Z
    for k in 0..=14 {
        let expected = usize::from(k >= 4 && k % 2 == 0);
        assert_eq!(h.rank(k), expected, "degree {k}");
    }
}

#[test]
fn non_integral_conjugate_is_rejected_over_z() {
    let mut s = OrbitSpectrum::new(vec![Orbit::new("x", 3, 2, true), Orbit::new("y", 2, 1, true)]);
    s.d1.push(SpectrumEntry::new("x", "y", 1));
    assert!(matches!(sc_from_spectrum(&s, Ring::Integers), Err(Error::NotRepresentable { .. })));
    assert!(sc_from_spectrum(&s, Ring::Rationals).is_ok());
}

#[test]
fn circle_model_is_independent_of_field_characteristic_prime_to_kappa() {
    let c = model_ck(6, Ring::Prime(5)).unwrap();
    let h = equivariant(&c, 10).unwrap().homology(0, 10).unwrap();
    assert_eq!(h.support(), vec![0]);
    let c = model_ck(6, Ring::Prime(3)).unwrap();
    let h = equivariant(&c, 10).unwrap().homology(0, 10).unwrap();
    assert_eq!(h.support(), (0..=10).collect::<Vec<_>>());
}
