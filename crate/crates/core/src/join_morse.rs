//! Join coordinates on `S^{2N+1}`, the Morse flow of `f̃(z) = Σ aⱼ|zⱼ|²`,
//! simplex-valued representations and the bookkeeping of broken trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-10;

/// `tⱼ = |zⱼ|²` and `τⱼ = arg zⱼ ∈ [0, 1)` (`None` where `zⱼ = 0`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JoinCoords {
    pub t: Vec<f64>,
    pub tau: Vec<Option<f64>>,
}

/// `arg z` with `z = |z| e^{2πi arg z}`, in `[0, 1)`.
pub fn arg(z: Complex64) -> f64 {
    let a = z.arg() / (2.0 * PI);
    let a = a.rem_euclid(1.0);
    if a >= 1.0 {
        0.0
    } else {
        a
    }
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
}

fn check_unit(z: &[Complex64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::Invalid("empty point".into()));
    }
    let n = norm(z);
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Invalid(format!("point has norm {n}, expected 1")));
    }
    Ok(())
}

pub fn join_coords(z: &[Complex64]) -> Result<JoinCoords> {
    check_unit(z)?;
    let t = z.iter().map(|w| w.norm_sqr()).collect();
    let tau = z.iter().map(|w| if *w == Complex64::new(0.0, 0.0) { None } else { Some(arg(*w)) }).collect();
    Ok(JoinCoords { t, tau })
}

pub fn join_inverse(t: &[f64], tau: &[Option<f64>]) -> Result<Vec<Complex64>> {
    if t.len() != tau.len() {
        return Err(Error::Dimension(format!("{} weights and {} angles", t.len(), tau.len())));
    }
    check_simplex(t, 1e-10)?;
    t.iter()
        .zip(tau)
        .enumerate()
        .map(|(j, (&tj, a))| match (tj > 0.0, a) {
            (false, _) => Ok(Complex64::new(0.0, 0.0)),
            (true, Some(a)) => Ok(Complex64::from_polar(tj.sqrt(), 2.0 * PI * a)),
            (true, None) => Err(Error::Invalid(format!("angle τ{j} missing where t{j} > 0"))),
        })
        .collect()
}

fn check_simplex(t: &[f64], tol: f64) -> Result<()> {
    let sum: f64 = t.iter().sum();
    if t.iter().any(|&x| x < -tol) || (sum - 1.0).abs() > tol {
        return Err(Error::Invalid(format!("{t:?} is not in the simplex")));
    }
    Ok(())
}

fn check_coefficients(a: &[f64], len: usize) -> Result<()> {
    if a.len() != len {
        return Err(Error::Dimension(format!("{} coefficients for {} coordinates", a.len(), len)));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("coefficients must be strictly increasing".into()));
    }
    Ok(())
}

/// `f̃(z) = Σ aⱼ|zⱼ|²`.
pub fn f_tilde(z: &[Complex64], a: &[f64]) -> f64 {
    z.iter().zip(a).map(|(w, aj)| aj * w.norm_sqr()).sum()
}

/// `∇f̃(z) = (2(aⱼ − f̃(z))zⱼ)ⱼ`.
pub fn grad_f_tilde(z: &[Complex64], a: &[f64]) -> Vec<Complex64> {
    let f = f_tilde(z, a);
    z.iter().zip(a).map(|(w, aj)| w * (2.0 * (aj - f))).collect()
}

/// Solution of `ż = ∇f̃(z)`: `zⱼ(t) = e^{2aⱼt}zⱼ(0)/‖·‖`.
pub fn morse_flow(z0: &[Complex64], a: &[f64], t: f64) -> Result<Vec<Complex64>> {
    check_unit(z0)?;
    check_coefficients(a, z0.len())?;
    // factor out the dominant exponent to avoid overflow
    let shift = z0
        .iter()
        .zip(a)
        .filter(|(w, _)| w.norm_sqr() > 0.0)
        .map(|(w, aj)| 2.0 * aj * t + w.norm().ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<Complex64> = z0
        .iter()
        .zip(a)
        .map(|(w, aj)| if w.norm_sqr() > 0.0 { w / w.norm() * (2.0 * aj * t + w.norm().ln() - shift).exp() } else { *w })
        .collect();
    let n = norm(&raw);
    Ok(raw.into_iter().map(|w| w / n).collect())
}

/// `ρ(s) = t(λ(s))` along the trajectory `λ(s) = morse_flow(z0, −s)`, which
/// runs from the top critical orbit at `s → −∞` to the bottom one at `s → +∞`.
pub fn rho_moment(z0: &[Complex64], a: &[f64], s: f64) -> Result<Vec<f64>> {
    Ok(morse_flow(z0, a, -s)?.iter().map(|w| w.norm_sqr()).collect())
}

fn sigma(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, increasing in between.
pub fn beta(s: f64) -> f64 {
    let (a, b) = (sigma(s), sigma(1.0 - s));
    a / (a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluingParams {
    /// `τ₀, …, τ_{N−1}`.
    pub angles: Vec<f64>,
    /// `L₁, …, L_{N−1}`.
    pub lengths: Vec<f64>,
}

impl GluingParams {
    pub fn new(angles: Vec<f64>, lengths: Vec<f64>) -> Result<Self> {
        if lengths.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::Invalid("lengths must be finite and nonnegative".into()));
        }
        if !angles.is_empty() && angles.len() != lengths.len() + 1 {
            return Err(Error::Dimension(format!("{} angles for {} lengths", angles.len(), lengths.len())));
        }
        Ok(GluingParams { angles, lengths })
    }

    pub fn n(&self) -> usize {
        self.lengths.len() + 1
    }
}

/// `t_N = 1 − β(s)`, `tᵢ = β(s − L_{N−1} − … − L_{i+1}) − β(s − L_{N−1} − … − Lᵢ)`,
/// `t₀ = β(s − L_{N−1} − … − L₁)`.
pub fn rho_explicit(params: &GluingParams, beta: impl Fn(f64) -> f64, s: f64) -> Vec<f64> {
    let n = params.n();
    let mut t = vec![0.0; n + 1];
    // offsets[i] = L_{N−1} + … + L_{i+1}, so offsets[N−1] = 0
    let mut offsets = vec![0.0; n];
    for i in (0..n - 1).rev() {
        offsets[i] = offsets[i + 1] + params.lengths[i];
    }
    t[n] = 1.0 - beta(s);
    for i in 1..n {
        t[i] = beta(s - offsets[i]) - beta(s - offsets[i - 1]);
    }
    t[0] = beta(s - offsets[0]);
    t
}

/// `max(|Σtᵢ − 1|, max(−tᵢ, 0))`.
pub fn simplex_residual(t: &[f64]) -> f64 {
    let sum: f64 = t.iter().sum();
    t.iter().fold((sum - 1.0).abs(), |acc, &x| acc.max(-x))
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingMember {
    pub k: i32,
    /// `δ = 10^{−k}`.
    pub delta: f64,
    /// Shift times, one per limit piece.
    pub shifts: Vec<f64>,
    /// Sup distance over `[−T, T]`, maximised over pieces.
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GluingReport {
    pub n: usize,
    pub window: f64,
    pub tolerance: f64,
    /// Broken limit as a descending chain of critical indices.
    pub chain: Vec<usize>,
    pub members: Vec<GluingMember>,
    pub monotone: bool,
    pub passed: bool,
}

/// Crossing times of the upper envelope of the lines `bᵢ − 4aᵢs`, from the
/// top index at `s → −∞` down to index 0.
fn envelope(b: &[f64], a: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut cur = a.len() - 1;
    let mut s_cur = f64::NEG_INFINITY;
    while cur > 0 {
        // next dominant index: the earliest crossing among lower slopes
        let mut best: Option<(usize, f64)> = None;
        for j in 0..cur {
            let s = (b[cur] - b[j]) / (4.0 * (a[cur] - a[j]));
            if s < s_cur {
                continue;
            }
            if best.is_none_or(|(bj, bs)| s < bs || (s == bs && j < bj)) {
                best = Some((j, s));
            }
        }
        let (j, s) = best.expect("lower index exists");
        out.push((cur, j, s));
        cur = j;
        s_cur = s;
    }
    out
}

/// Degenerating family `z0 ∝ (δ^{(i−m)²})ᵢ` with `δ = 10^{−k}`, `aᵢ = i + 1`
/// and `m = 1`. Each member is compared, after shifting at the crossing
/// times, with the moment paths of the two-orbit limit pieces.
pub fn check_gluing(n: usize, ks: &[i32], window: f64, tolerance: f64) -> Result<GluingReport> {
    if n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    if n == 1 {
        return Ok(GluingReport {
            n,
            window,
            tolerance,
            chain: vec![1, 0],
            members: Vec::new(),
            monotone: true,
            passed: true,
        });
    }
    let a: Vec<f64> = (0..=n).map(|i| i as f64 + 1.0).collect();
    let m = 1i64;
    let samples = 401;
    let mut members = Vec::new();
    let mut chain = Vec::new();
    for &k in ks {
        let delta = 10f64.powi(-k);
        let log_w: Vec<f64> = (0..=n as i64).map(|i| ((i - m) * (i - m)) as f64 * delta.ln()).collect();
        let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<Complex64> = log_w.iter().map(|l| Complex64::new((l - top).exp(), 0.0)).collect();
        let nz = norm(&raw);
        let z0: Vec<Complex64> = raw.iter().map(|w| w / nz).collect();
        // |zᵢ(−s)|² ∝ exp(bᵢ − 4aᵢs)
        let b: Vec<f64> = log_w.iter().map(|l| 2.0 * l).collect();
        let pieces = envelope(&b, &a);
        chain = std::iter::once(pieces[0].0).chain(pieces.iter().map(|p| p.1)).collect();
        let mut distance: f64 = 0.0;
        for &(hi, lo, shift) in &pieces {
            let limit = {
                let mut w = vec![Complex64::new(0.0, 0.0); n + 1];
                w[hi] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                w[lo] = w[hi];
                w
            };
            for step in 0..samples {
                let s = -window + 2.0 * window * step as f64 / (samples - 1) as f64;
                let got = rho_moment(&z0, &a, s + shift)?;
                let want = rho_moment(&limit, &a, s)?;
                let d = got.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                distance = distance.max(d);
            }
        }
        members.push(GluingMember { k, delta, shifts: pieces.iter().map(|p| p.2).collect(), distance });
    }
    let monotone = members.windows(2).all(|w| w[1].distance < w[0].distance);
    let last_ok = members.last().is_none_or(|m| m.distance < tolerance);
    Ok(GluingReport { n, window, tolerance, chain, members, monotone, passed: monotone && last_ok })
}

/// A time-dependent function `H(θ, x)` on `S¹ × ℝ^m` with its `θ`-derivative.
pub trait TimeDependent {
    fn value(&self, theta: f64, x: &[f64]) -> f64;
    fn theta_derivative(&self, theta: f64, x: &[f64]) -> f64;
}

/// `H(θ, x) = cos(2πθ)·x₁ + x₂²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleHamiltonian;

impl TimeDependent for SampleHamiltonian {
    fn value(&self, theta: f64, x: &[f64]) -> f64 {
        (2.0 * PI * theta).cos() * x[0] + x[1] * x[1]
    }

    fn theta_derivative(&self, theta: f64, x: &[f64]) -> f64 {
        -2.0 * PI * (2.0 * PI * theta).sin() * x[0]
    }
}

/// `H(θ, x) = c`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantHamiltonian(pub f64);

impl TimeDependent for ConstantHamiltonian {
    fn value(&self, _: f64, _: &[f64]) -> f64 {
        self.0
    }

    fn theta_derivative(&self, _: f64, _: &[f64]) -> f64 {
        0.0
    }
}

/// `H_{N,0}(θ, x, z) = Σⱼ |zⱼ|² H(θ − arg zⱼ, x)`.
pub fn h_n0(h: &dyn TimeDependent, theta: f64, x: &[f64], z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr() * h.value(theta - arg(*w), x)).sum()
}

/// `∇_z H_{N,0} = (2(H^{θ−arg zⱼ} − H_{N,0})zⱼ − (1/2π)Ḣ^{θ−arg zⱼ} i zⱼ)ⱼ`.
pub fn grad_h_n0(h: &dyn TimeDependent, theta: f64, x: &[f64], z: &[Complex64]) -> Vec<Complex64> {
    let total = h_n0(h, theta, x, z);
    z.iter()
        .map(|w| {
            let t = theta - arg(*w);
            w * (2.0 * (h.value(t, x) - total)) - Complex64::i() * w * (h.theta_derivative(t, x) / (2.0 * PI))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientReport {
    pub max_error: f64,
    pub tolerance: f64,
    pub step: f64,
    pub passed: bool,
}

/// Compares the closed-form gradient with central differences of `H_{N,0}`
/// in the real coordinates of `z`, projected to the tangent space of the
/// sphere. Points with a vanishing coordinate are rejected.
pub fn grad_hn0_check(
    h: &dyn TimeDependent,
    z: &[Complex64],
    theta: f64,
    x: &[f64],
    step: f64,
) -> Result<GradientReport> {
    check_unit(z)?;
    if let Some(j) = z.iter().position(|w| w.norm() < 1e-6) {
        return Err(Error::Invalid(format!("coordinate z{j} vanishes; H_N0 is not smooth there")));
    }
    let mut fd = vec![Complex64::new(0.0, 0.0); z.len()];
    for j in 0..z.len() {
        for (part, unit) in [(0, Complex64::new(1.0, 0.0)), (1, Complex64::i())] {
            let mut plus = z.to_vec();
            let mut minus = z.to_vec();
            plus[j] += unit * step;
            minus[j] -= unit * step;
            let d = (h_n0(h, theta, x, &plus) - h_n0(h, theta, x, &minus)) / (2.0 * step);
            if part == 0 {
                fd[j].re = d;
            } else {
                fd[j].im = d;
            }
        }
    }
    // remove the radial part Re⟨g, z⟩ z
    let radial: f64 = fd.iter().zip(z).map(|(g, w)| (g * w.conj()).re).sum();
    let projected: Vec<Complex64> = fd.iter().zip(z).map(|(g, w)| g - w * radial).collect();
    let formula = grad_h_n0(h, theta, x, z);
    let max_error = projected.iter().zip(&formula).map(|(p, f)| (p - f).norm()).fold(0.0, f64::max);
    let tolerance = 1e-6;
    Ok(GradientReport { max_error, tolerance, step, passed: max_error < tolerance })
}

#[derive(Clone, Debug, Serialize)]
pub struct Stratum {
    /// Descending chain `k = c₀ > c₁ > … > c_ℓ = j`.
    pub chain: Vec<usize>,
    /// `dim M(a, b) = 2(a − b) − 1` per piece.
    pub piece_dims: Vec<i64>,
    pub dim: i64,
    pub codim: i64,
    pub breaks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrataReport {
    pub k: usize,
    pub j: usize,
    pub interior_dim: i64,
    pub strata: Vec<Stratum>,
    /// Every stratum has codimension equal to its number of breaks.
    pub consistent: bool,
}

/// `dim M(a, b)` for the Morse flow on `ℂP^N`.
pub fn moduli_dim(a: usize, b: usize) -> i64 {
    2 * (a as i64 - b as i64) - 1
}

/// All strata `M(c₀, c₁) × … × M(c_{ℓ−1}, c_ℓ)` of the compactified `M̄(k, j)`.
pub fn strata(k: usize, j: usize) -> Result<StrataReport> {
    if k <= j {
        return Err(Error::Invalid(format!("need k > j, got ({k}, {j})")));
    }
    let interior_dim = moduli_dim(k, j);
    let between: Vec<usize> = (j + 1..k).rev().collect();
    let mut strata = Vec::new();
    for mask in 0u64..(1u64 << between.len()) {
        let mut chain = vec![k];
        chain.extend(between.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c));
        chain.push(j);
        let piece_dims: Vec<i64> = chain.windows(2).map(|w| moduli_dim(w[0], w[1])).collect();
        let dim: i64 = piece_dims.iter().sum();
        let breaks = piece_dims.len() - 1;
        strata.push(Stratum { codim: interior_dim - dim, chain, piece_dims, dim, breaks });
    }
    strata.sort_by(|a, b| a.breaks.cmp(&b.breaks).then_with(|| b.chain.cmp(&a.chain)));
    let consistent = strata.iter().all(|s| s.codim == s.breaks as i64);
    Ok(StrataReport { k, j, interior_dim, strata, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn join_coordinates_of_i() {
        let j = join_coords(&[c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(j.t, vec![0.0, 1.0]);
        assert_eq!(j.tau[0], None);
        assert_abs_diff_eq!(j.tau[1].unwrap(), 0.25, epsilon = 1e-15);
        assert!(join_coords(&[c(1.0, 1.0)]).is_err());
    }

    #[test]
    fn explicit_representation_examples() {
        let p = GluingParams::new(vec![], vec![2.0]).unwrap();
        assert_eq!(rho_explicit(&p, beta, -5.0), vec![0.0, 0.0, 1.0]);
        assert_eq!(rho_explicit(&p, beta, 10.0), vec![1.0, 0.0, 0.0]);
        let t = rho_explicit(&p, beta, 0.5);
        assert_eq!(t[0], 0.0);
        assert_abs_diff_eq!(t[1], beta(0.5), epsilon = 1e-15);
        assert_abs_diff_eq!(t.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn flow_on_two_coordinates() {
        let z0 = [c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(std::f64::consts::FRAC_1_SQRT_2, 0.0)];
        let a = [1.0, 2.0];
        let mut last = f_tilde(&z0, &a);
        assert_abs_diff_eq!(last, 1.5, epsilon = 1e-15);
        for i in 1..=100 {
            let z = morse_flow(&z0, &a, i as f64 * 0.1).unwrap();
            let f = f_tilde(&z, &a);
            assert!(f >= last - 1e-15);
            last = f;
        }
        assert!((last - 2.0).abs() < 1e-8);
        assert!(morse_flow(&z0, &[2.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn strata_of_three_zero() {
        let r = strata(3, 0).unwrap();
        assert_eq!(r.interior_dim, 5);
        let dims: Vec<(Vec<usize>, i64)> = r.strata.iter().map(|s| (s.chain.clone(), s.dim)).collect();
        assert_eq!(
            dims,
            vec![
                (vec![3, 0], 5),
                (vec![3, 2, 0], 4),
                (vec![3, 1, 0], 4),
                (vec![3, 2, 1, 0], 3),
            ]
        );
        assert!(r.consistent);
        assert!(strata(1, 1).is_err());
    }

    #[test]
    fn gluing_for_one_and_two() {
        assert!(check_gluing(1, &[2, 3], 5.0, 1e-3).unwrap().passed);
        let r = check_gluing(2, &[2, 3, 4, 5, 6], 5.0, 1e-3).unwrap();
        assert_eq!(r.chain, vec![2, 1, 0]);
        assert!(r.passed, "{r:?}");
    }
}
