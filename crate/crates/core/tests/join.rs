use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use s1chains::join_morse::{
    beta, f_tilde, grad_hn0_check, join_coords, join_inverse, moduli_dim, morse_flow, rho_explicit, rho_moment,
    simplex_residual, strata, ConstantHamiltonian, GluingParams, SampleHamiltonian,
};

fn unit_point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..1.0), 2..=5).prop_map(|parts| {
        let raw: Vec<Complex64> =
            parts.iter().map(|&(r, phase)| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * phase)).collect();
        let norm = raw.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        raw.into_iter().map(|w| w / norm).collect()
    })
}

fn weights(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 * 1.5 + 0.25).collect()
}

proptest! {
    #[test]
    fn join_coordinates_round_trip(z in unit_point()) {
        let c = join_coords(&z).unwrap();
        prop_assert!(simplex_residual(&c.t) < 1e-12);
        let back = join_inverse(&c.t, &c.tau).unwrap();
        for (a, b) in back.iter().zip(&z) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn flow_preserves_sphere_and_increases_f(z in unit_point(), t in 0.0f64..4.0, dt in 0.0f64..2.0) {
        let a = weights(z.len());
        let early = morse_flow(&z, &a, t).unwrap();
        let late = morse_flow(&z, &a, t + dt).unwrap();
        let norm = late.iter().map(|w| w.norm_sqr()).sum::<f64>();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(late.iter().zip(&z).all(|(w, w0)| (w.norm_sqr() > 0.0) == (w0.norm_sqr() > 0.0)));
        prop_assert!(f_tilde(&late, &a) >= f_tilde(&early, &a) - 1e-12);
    }

    #[test]
    fn moment_path_lies_on_simplex(z in unit_point(), s in -20.0f64..20.0) {
        let a = weights(z.len());
        prop_assert!(simplex_residual(&rho_moment(&z, &a, s).unwrap()) < 1e-12);
    }

    #[test]
    fn explicit_path_lies_on_simplex(lengths in prop::collection::vec(0.0f64..6.0, 0..5), s in -5.0f64..30.0) {
        let p = GluingParams::new(Vec::new(), lengths).unwrap();
        let t = rho_explicit(&p, beta, s);
        prop_assert_eq!(t.len(), p.n() + 1);
        prop_assert!(simplex_residual(&t) < 1e-12);
    }

    #[test]
    fn gradient_formula_matches_differences(z in unit_point(), theta in 0.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        let r = grad_hn0_check(&SampleHamiltonian, &z, theta, &[x1, x2], 1e-5).unwrap();
        prop_assert!(r.passed, "error {}", r.max_error);
    }
}

#[test]
fn moment_path_runs_from_top_to_bottom_orbit() {
    let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let a = [0.0, 1.0];
    let start = rho_moment(&z, &a, -30.0).unwrap();
    let end = rho_moment(&z, &a, 30.0).unwrap();
    assert_abs_diff_eq!(start[1], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(end[0], 1.0, epsilon = 1e-12);
}

#[test]
fn beta_profile() {
    assert_eq!(beta(-1.0), 0.0);
    assert_eq!(beta(0.0), 0.0);
    assert_eq!(beta(1.0), 1.0);
    assert_abs_diff_eq!(beta(0.5), 0.5, epsilon = 1e-15);
    let samples: Vec<f64> = (0..=100).map(|i| beta(i as f64 / 100.0)).collect();
    assert!(samples.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn constant_hamiltonian_has_zero_gradient_error() {
    let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let r = grad_hn0_check(&ConstantHamiltonian(2.5), &z, 0.1, &[0.0, 0.0], 1e-5).unwrap();
    assert!(r.max_error < 1e-9);
}

#[test]
fn strata_counts_and_dimensions() {
    for k in 1..=6usize {
        for j in 0..k {
            let r = strata(k, j).unwrap();
            assert_eq!(r.interior_dim, moduli_dim(k, j));
            assert_eq!(r.strata.len(), 1 << (k - j - 1));
            for s in &r.strata {
                assert_eq!(s.codim, s.breaks as i64);
                assert_eq!(s.dim + s.codim, r.interior_dim);
            }
        }
    }
    assert!(strata(2, 2).is_err());
}
