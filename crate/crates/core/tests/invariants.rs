use proptest::prelude::*;

use s1chains::complex::homology;
use s1chains::io::{parse_complex, ComplexFile};
use s1chains::linalg::{rational, Matrix, Ring};
use s1chains::models::{random_multicomplex, RandomParams};
use s1chains::s1::{equivariant, gysin_les, S1Complex};

fn small() -> RandomParams {
    RandomParams { max_generators: 14, max_blocks: 4, ..RandomParams::default() }
}

fn complex(seed: u64) -> S1Complex {
    random_multicomplex(seed, &small()).unwrap()
}

fn ranks(c: &S1Complex, lo: i64, hi: i64) -> Vec<usize> {
    let h = equivariant(c, hi).unwrap().homology(lo, hi).unwrap();
    (lo..=hi).map(|k| h.rank(k)).collect()
}

/// Upper unitriangular change of basis within each degree, with its inverse.
fn unitriangular(c: &S1Complex, seed: u64) -> (Matrix, Matrix) {
    let n = c.len();
    let gens = c.generators();
    let mut p = Matrix::identity(n);
    let mut state = seed;
    for i in 0..n {
        for j in i + 1..n {
            if gens[i].degree == gens[j].degree {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                p.set(i, j, rational((state >> 61) as i64 - 3));
            }
        }
    }
    // P = I + N with N nilpotent, so P⁻¹ = Σ (−N)^k
    let mut neg_n = p.clone();
    for i in 0..n {
        neg_n.set(i, i, rational(0));
    }
    neg_n = neg_n.scale(&rational(-1));
    let mut inv = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    for _ in 0..n {
        power = power.checked_mul(&neg_n).unwrap();
        inv = &inv + &power;
    }
    (p, inv)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn random_complexes_satisfy_relations(seed in 0u64..10_000) {
        let c = complex(seed);
        prop_assert!(c.verify_relations().unwrap().holds());
        prop_assert!(c.len() <= 14);
    }

    #[test]
    fn gysin_sequence_exact_over_fields(seed in 0u64..10_000, p in prop::sample::select(vec![2u64, 3, 7])) {
        let c = complex(seed).with_ring(Ring::Prime(p)).unwrap();
        let r = gysin_les(&c, 9).unwrap();
        prop_assert!(r.exact());
        prop_assert!(r.connecting_is_b());
    }

    #[test]
    fn conjugation_preserves_equivariant_homology(seed in 0u64..10_000, basis in 0u64..1000) {
        let c = complex(seed);
        let (p, p_inv) = unitriangular(&c, basis);
        let d = c.conjugate(&p, &p_inv).unwrap();
        prop_assert!(d.verify_relations().unwrap().holds());
        let q = |x: &S1Complex| x.with_ring(Ring::Rationals).unwrap();
        prop_assert_eq!(ranks(&q(&c), -2, 9), ranks(&q(&d), -2, 9));
    }

    #[test]
    fn even_shift_moves_homology(seed in 0u64..10_000, s in -2i64..=2) {
        let c = complex(seed).with_ring(Ring::Rationals).unwrap();
        let shifted = c.shift_even(s).unwrap();
        let delta = shifted.generators()[0].degree - c.generators()[0].degree;
        prop_assert_eq!(delta.abs(), 2 * s.abs());
        let before = ranks(&c, -6, 8);
        let after = ranks(&shifted, -6 + delta, 8 + delta);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn euler_characteristic_matches_rational_ranks(seed in 0u64..10_000) {
        let c = complex(seed).with_ring(Ring::Rationals).unwrap();
        let h = homology(c.base(), None).unwrap();
        let alternating: i64 = h.groups.iter().map(|(k, g)| if k % 2 == 0 { 1 } else { -1 } * g.free_rank() as i64).sum();
        prop_assert_eq!(alternating, c.base().euler_characteristic());
    }

    #[test]
    fn prime_field_dimension_bounds_rational_rank(seed in 0u64..10_000, p in prop::sample::select(vec![2u64, 3, 5])) {
        let c = complex(seed);
        let hq = homology(c.with_ring(Ring::Rationals).unwrap().base(), None).unwrap();
        let hp = homology(c.with_ring(Ring::Prime(p)).unwrap().base(), None).unwrap();
        let hz = homology(c.base(), None).unwrap();
        for k in hq.groups.keys() {
            prop_assert!(hp.rank(*k) >= hq.rank(*k));
            prop_assert_eq!(hz.rank(*k), hq.rank(*k));
        }
    }

    #[test]
    fn complex_files_round_trip(seed in 0u64..10_000) {
        let c = complex(seed);
        let text = serde_json::to_string(&ComplexFile::from_complex(&c)).unwrap();
        let once = parse_complex(&text).unwrap().to_complex().unwrap();
        let twice = ComplexFile::from_complex(&once).to_complex().unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(ranks(&c, -2, 8), ranks(&once, -2, 8));
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"ring":"Q","generators":[],"differential":[],"extra":1}"#;
    assert!(parse_complex(text).is_err());
}
