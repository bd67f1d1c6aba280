use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::spectrum::{sc_from_spectrum, Orbit, OrbitSpectrum, SpectrumEntry};
use super::{model_cbad, model_ck};
use crate::complex::{ChainComplex, Generator};
use crate::error::{Error, Result};
use crate::linalg::{rational, Matrix, Ring};
use crate::s1::S1Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Circle,
    Bad,
    Spectrum,
    HomotopyMixed,
}

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub max_generators: usize,
    pub max_blocks: usize,
    /// Blocks are shifted by `2s` with `0 ≤ s ≤ max_shift`.
    pub max_shift: i64,
    pub max_kappa: i64,
    /// Elementary operations in the change of basis.
    pub mixing_steps: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_generators: 40, max_blocks: 6, max_shift: 3, max_kappa: 6, mixing_steps: 30 }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumParams {
    pub max_circles: usize,
    pub max_kappa: i64,
    pub max_degree: i64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams { max_circles: 20, max_kappa: 6, max_degree: 8 }
    }
}

/// Generators `a, b, c, d` in degrees 0–3 with `φ₀d = −λμ c`, `φ₁a = λb`,
/// `φ₁b = μc`, `φ₂a = d`: `φ₁² = φ₀φ₂ + φ₂φ₀` only up to homotopy.
pub fn homotopy_block(lambda: i64, mu: i64, ring: Ring) -> Result<S1Complex> {
    let gens = ["a", "b", "c", "d"].iter().enumerate().map(|(i, n)| Generator::new(*n, i as i64)).collect();
    let mut d = Matrix::zeros(4, 4);
    d.set(2, 3, rational(-lambda * mu));
    let mut phi1 = Matrix::zeros(4, 4);
    phi1.set(1, 0, rational(lambda));
    phi1.set(2, 1, rational(mu));
    let mut phi2 = Matrix::zeros(4, 4);
    phi2.set(3, 0, rational(1));
    S1Complex::new(ChainComplex::new(ring, gens, d)?, vec![phi1, phi2])
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    let v = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Random admissible spectrum: `∂` from two-term blocks with integral `∂'`,
/// `d² = ∂'K + K∂` plus free entries between circles without `∂`, and bad
/// minima data `d¹ = 2L` with `d²γ_M = ∂'L` on bad circles.
pub fn random_spectrum(seed: u64, params: &SpectrumParams) -> OrbitSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spectrum_from_rng(&mut rng, params)
}

fn spectrum_from_rng(rng: &mut ChaCha8Rng, params: &SpectrumParams) -> OrbitSpectrum {
    let n = rng.gen_range(1..=params.max_circles.max(1));
    let mut orbits = Vec::with_capacity(n);
    for i in 0..n {
        let degree = rng.gen_range(0..=params.max_degree);
        let good = params.max_kappa < 2 || rng.gen_bool(0.7);
        let kappa = if good { rng.gen_range(1..=params.max_kappa.max(1)) } else { 2 * rng.gen_range(1..=params.max_kappa / 2) };
        orbits.push(Orbit::new(format!("o{i}"), degree, kappa, good));
    }
    let good: Vec<usize> = (0..n).filter(|&i| orbits[i].good).collect();
    let kappa = |i: usize| orbits[i].multiplicity;
    let deg = |i: usize| orbits[i].degree;

    // ∂ as (from, to, coeff) on disjoint pairs; coefficient κ_from·c keeps ∂' integral
    let mut partial: Vec<(usize, usize, i64)> = Vec::new();
    let mut used = vec![false; n];
    let mut order = good.clone();
    order.shuffle(rng);
    for &a in &order {
        if used[a] || !rng.gen_bool(0.5) {
            continue;
        }
        let candidates: Vec<usize> = good.iter().copied().filter(|&b| !used[b] && b != a && deg(b) == deg(a) - 1).collect();
        if let Some(&b) = candidates.choose(rng) {
            used[a] = true;
            used[b] = true;
            partial.push((a, b, kappa(a) * nonzero(rng, 2)));
        }
    }
    let dp = |t: usize, f: usize| -> i64 {
        partial.iter().filter(|&&(a, b, _)| a == f && b == t).map(|&(_, _, c)| c).sum()
    };
    // ∂'_{t,f} = ∂_{t,f}·κ_t/κ_f
    let dp_conj = |t: usize, f: usize| -> i64 { dp(t, f) * kappa(t) / kappa(f) };

    // K : γ_M ↦ γ'_m with μ' = μ − 1 on good circles
    let mut k_entries: Vec<(usize, usize, i64)> = Vec::new();
    for &a in &good {
        for &b in &good {
            if deg(b) == deg(a) - 1 && rng.gen_bool(0.25) {
                k_entries.push((a, b, nonzero(rng, 1)));
            }
        }
    }
    let k = |t: usize, f: usize| -> i64 {
        k_entries.iter().filter(|&&(a, b, _)| a == f && b == t).map(|&(_, _, c)| c).sum()
    };
    let mut d2 = vec![vec![0i64; n]; n];
    for &f in &good {
        for &t in &good {
            if deg(t) != deg(f) - 2 {
                continue;
            }
            let mut v = 0;
            for &mid in &good {
                v += dp_conj(t, mid) * k(mid, f) + k(t, mid) * dp(mid, f);
            }
            if !used[f] && !used[t] && rng.gen_bool(0.4) {
                v += nonzero(rng, 2);
            }
            d2[t][f] += v;
        }
    }
    // bad circles: d¹γ_m = 2L(γ_m), d²γ_M = ∂'L(γ_m)
    let mut bad_m = Vec::new();
    for f in (0..n).filter(|&i| !orbits[i].good) {
        let mut l = vec![0i64; n];
        for &t in &good {
            if deg(t) == deg(f) - 1 && rng.gen_bool(0.4) {
                l[t] = nonzero(rng, 1);
            }
        }
        for &t in &good {
            if l[t] != 0 {
                bad_m.push(SpectrumEntry::new(orbits[f].name.clone(), orbits[t].name.clone(), 2 * l[t]));
            }
        }
        for &t in &good {
            if deg(t) == deg(f) - 2 {
                d2[t][f] += good.iter().map(|&mid| dp_conj(t, mid) * l[mid]).sum::<i64>();
            }
        }
    }
    let name = |i: usize| orbits[i].name.clone();
    let d1 = partial.iter().map(|&(a, b, c)| SpectrumEntry::new(name(a), name(b), c)).collect();
    let mut d2_entries = Vec::new();
    for (t, row) in d2.iter().enumerate() {
        for (f, &v) in row.iter().enumerate() {
            if v != 0 {
                d2_entries.push(SpectrumEntry::new(name(f), name(t), v));
            }
        }
    }
    OrbitSpectrum { orbits, d1, d2: d2_entries, d1_bad_m: bad_m }
}

fn assemble(blocks: &[S1Complex], ring: Ring) -> Result<S1Complex> {
    let mut generators = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        generators.extend(block.generators().iter().map(|g| Generator::new(format!("b{b}.{}", g.name), g.degree)));
    }
    let top = blocks.iter().map(S1Complex::max_index).max().unwrap_or(0);
    let diag = |i: usize| {
        let parts: Vec<Matrix> = blocks.iter().map(|b| b.phi(i)).collect();
        Matrix::block_diagonal(&parts.iter().collect::<Vec<_>>())
    };
    let base = ChainComplex::new(ring, generators, diag(0))?;
    S1Complex::new(base, (1..=top).map(diag).collect())
}

fn random_blocks(rng: &mut ChaCha8Rng, params: &RandomParams) -> Result<Vec<S1Complex>> {
    let ring = Ring::Integers;
    let target = rng.gen_range(1..=params.max_blocks.max(1));
    let mut blocks = Vec::new();
    let mut size = 0;
    for _ in 0..target {
        let kind = *[BlockKind::Circle, BlockKind::Bad, BlockKind::Spectrum, BlockKind::HomotopyMixed]
            .choose(rng)
            .expect("nonempty");
        let block = match kind {
            BlockKind::Circle => model_ck(rng.gen_range(1..=params.max_kappa.max(1)), ring)?,
            BlockKind::Bad => model_cbad(ring)?,
            BlockKind::HomotopyMixed => homotopy_block(nonzero(rng, 3), nonzero(rng, 3), ring)?,
            BlockKind::Spectrum => {
                let sp = SpectrumParams { max_circles: 4, max_kappa: params.max_kappa, max_degree: 3 };
                sc_from_spectrum(&spectrum_from_rng(rng, &sp), ring)?.plus.complex
            }
        };
        if size + block.len() > params.max_generators {
            continue;
        }
        size += block.len();
        let shift = rng.gen_range(0..=params.max_shift);
        blocks.push(block.shift_even(shift)?);
    }
    Ok(blocks)
}

/// Degree-preserving unimodular change of basis; when `sub` is given, new
/// generators in `sub` only involve old generators in `sub`.
fn mix(c: &S1Complex, sub: Option<&[bool]>, steps: usize, rng: &mut ChaCha8Rng) -> Result<S1Complex> {
    let n = c.len();
    let gens = c.generators();
    let allowed = |i: usize, j: usize| i != j && gens[i].degree == gens[j].degree && sub.is_none_or(|s| !s[j] || s[i]);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| allowed(i, j)).collect();
    let mut p = Matrix::identity(n);
    let mut p_inv = Matrix::identity(n);
    for _ in 0..steps {
        if rng.gen_bool(0.2) || pairs.is_empty() {
            if n == 0 {
                break;
            }
            let j = rng.gen_range(0..n);
            for r in 0..n {
                let v = -p.get(r, j).clone();
                p.set(r, j, v);
                let w = -p_inv.get(j, r).clone();
                p_inv.set(j, r, w);
            }
            continue;
        }
        let &(i, j) = pairs.choose(rng).expect("nonempty");
        let c = rational(nonzero(rng, 2));
        // P ← P·(I + c e_i e_jᵀ), P⁻¹ ← (I − c e_i e_jᵀ)·P⁻¹
        for r in 0..n {
            let v = p.get(r, i) * &c;
            p.add_to(r, j, &v);
            let w = -(p_inv.get(j, r) * &c);
            p_inv.add_to(i, r, &w);
        }
    }
    let mixed = c.conjugate(&p, &p_inv)?;
    if let Some(k) = mixed.verify_relations()?.first_failure() {
        return Err(Error::Relation(k));
    }
    Ok(mixed)
}

/// Direct sum of circle, bad, spectrum and homotopy-mixed blocks with even
/// degree shifts, conjugated by a random unimodular change of basis. Over `ℤ`.
pub fn random_multicomplex(seed: u64, params: &RandomParams) -> Result<S1Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = random_blocks(&mut rng, params)?;
    let c = assemble(&blocks, Ring::Integers)?;
    mix(&c, None, params.mixing_steps, &mut rng)
}

/// A random multicomplex together with a nonempty invariant subset of
/// generators, closed under every `φᵢ`.
pub fn random_invariant_pair(seed: u64, params: &RandomParams) -> Result<(S1Complex, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = random_blocks(&mut rng, params)?;
    let c = assemble(&blocks, Ring::Integers)?;
    let n = c.len();
    let phis: Vec<Matrix> = (0..=c.max_index()).map(|i| c.phi(i)).collect();
    let mut sub = vec![false; n];
    for _ in 0..10 {
        sub = (0..n).map(|_| rng.gen_bool(0.3)).collect();
        // close under the targets of every operation
        let mut changed = true;
        while changed {
            changed = false;
            for phi in &phis {
                for (row, col, _) in phi.nonzero_entries() {
                    if sub[col] && !sub[row] {
                        sub[row] = true;
                        changed = true;
                    }
                }
            }
        }
        let count = sub.iter().filter(|&&s| s).count();
        if count > 0 && count < n {
            break;
        }
    }
    let mixed = mix(&c, Some(&sub), params.mixing_steps, &mut rng)?;
    Ok((mixed, (0..n).filter(|&i| sub[i]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homotopy_block_is_not_mixed() {
        let b = homotopy_block(2, 3, Ring::Integers).unwrap();
        assert!(b.verify_relations().unwrap().holds());
        assert!(!b.is_mixed_complex().unwrap());
    }

    #[test]
    fn seeds_are_reproducible() {
        let p = RandomParams::default();
        assert_eq!(random_multicomplex(7, &p).unwrap(), random_multicomplex(7, &p).unwrap());
        assert_eq!(random_spectrum(7, &SpectrumParams::default()), random_spectrum(7, &SpectrumParams::default()));
    }

    #[test]
    fn random_spectra_are_admissible() {
        for seed in 0..30 {
            let s = random_spectrum(seed, &SpectrumParams::default());
            assert!(s.orbits.len() <= 20);
            sc_from_spectrum(&s, Ring::Integers).unwrap();
        }
    }

    #[test]
    fn pairs_are_invariant() {
        for seed in 0..10 {
            let (c, sub) = random_invariant_pair(seed, &RandomParams::default()).unwrap();
            assert!(c.len() <= 40);
            for i in 0..=c.max_index() {
                for (row, col, _) in c.phi(i).nonzero_entries() {
                    assert!(!sub.contains(&col) || sub.contains(&row));
                }
            }
        }
    }
}
