//! Graded chain complexes, chain maps, shifts and cones.

mod homology;
mod ses;

pub use homology::{homology, homology_group, induced_map, DegreeSummary, HomologyGroup, HomologyResult};
pub use ses::{
    check_exact_at, connecting_map, les_from_ses, les_with_labels, LesNode, LesReport, NodeStatus, ShortExactSequence,
};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator { name: name.into(), degree }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (deg {})", self.name, self.degree)
    }
}

/// Checks that every nonzero entry of `m` (column = source, row = target)
/// raises degree by exactly `shift`.
pub fn check_degree_rule(
    m: &Matrix,
    source: &[Generator],
    target: &[Generator],
    shift: i64,
) -> Result<()> {
    if m.rows() != target.len() || m.cols() != source.len() {
        return Err(Error::Dimension(format!(
            "expected a {}x{} matrix, got {}x{}",
            target.len(),
            source.len(),
            m.rows(),
            m.cols()
        )));
    }
    for (i, j, _) in m.nonzero_entries() {
        if target[i].degree != source[j].degree + shift {
            return Err(Error::Degree {
                from: source[j].name.clone(),
                to: target[i].name.clone(),
                reason: format!(
                    "degree {} -> {}, expected a change of {shift}",
                    source[j].degree, target[i].degree
                ),
            });
        }
    }
    Ok(())
}

/// A finitely generated free graded module with a degree −1 differential.
///
/// `differential` is square; column `j` holds ∂ of generator `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    ring: Ring,
    generators: Vec<Generator>,
    differential: Matrix,
}

impl ChainComplex {
    /// Validates names, the degree rule, ring membership and ∂² = 0.
    pub fn new(ring: Ring, generators: Vec<Generator>, differential: Matrix) -> Result<Self> {
        let c = Self::new_unchecked(ring, generators, differential)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Like [`ChainComplex::new`] but skips the ∂² = 0 check.
    pub fn new_unchecked(ring: Ring, generators: Vec<Generator>, differential: Matrix) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.name.as_str()) {
                return Err(Error::Invalid(format!("duplicate generator name `{}`", g.name)));
            }
        }
        check_degree_rule(&differential, &generators, &generators, -1)?;
        let differential = ring.normalize(&differential)?;
        Ok(ChainComplex { ring, generators, differential })
    }

    pub fn zero(ring: Ring) -> Self {
        ChainComplex { ring, generators: Vec::new(), differential: Matrix::zeros(0, 0) }
    }

    /// Complex with vanishing differential.
    pub fn free(ring: Ring, generators: Vec<Generator>) -> Result<Self> {
        let n = generators.len();
        Self::new(ring, generators, Matrix::zeros(n, n))
    }

    pub fn check_square_zero(&self) -> Result<()> {
        let sq = self.ring.mul(&self.differential, &self.differential)?;
        if let Some((_, j, _)) = sq.nonzero_entries().next() {
            return Err(Error::NotAComplex { degree: self.generators[j].degree });
        }
        Ok(())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn differential(&self) -> &Matrix {
        &self.differential
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn name_index(&self) -> HashMap<String, usize> {
        self.generators.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect()
    }

    /// Indices of the generators in degree `k`, in generator order.
    pub fn indices(&self, k: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.generators[i].degree == k).collect()
    }

    pub fn rank_in_degree(&self, k: i64) -> usize {
        self.generators.iter().filter(|g| g.degree == k).count()
    }

    /// `(min, max)` generator degree, `None` for the zero complex.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let min = self.generators.iter().map(|g| g.degree).min()?;
        let max = self.generators.iter().map(|g| g.degree).max()?;
        Some((min, max))
    }

    /// ∂_k : C_k → C_{k−1} in the generator order of each degree.
    pub fn boundary(&self, k: i64) -> Matrix {
        self.differential.select(&self.indices(k - 1), &self.indices(k))
    }

    /// Same generators and differential read in another ring.
    pub fn with_ring(&self, ring: Ring) -> Result<Self> {
        Self::new(ring, self.generators.clone(), self.differential.clone())
    }

    /// Reorders generators lexicographically by `(degree, name)`.
    pub fn sorted(&self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (ga, gb) = (&self.generators[a], &self.generators[b]);
            (ga.degree, &ga.name).cmp(&(gb.degree, &gb.name))
        });
        self.permuted(&order)
    }

    /// New complex whose generator `i` is old generator `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        ChainComplex {
            ring: self.ring,
            generators: order.iter().map(|&i| self.generators[i].clone()).collect(),
            differential: self.differential.select(order, order),
        }
    }

    /// Subcomplex spanned by generators of degree at most `max_degree`.
    pub fn truncated_above(&self, max_degree: i64) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.generators[i].degree <= max_degree).collect();
        self.permuted(&keep)
    }

    /// `C[k]_n = C_{n+k}` with differential `(−1)^k ∂`.
    pub fn shift(&self, k: i64) -> Self {
        let generators = self.generators.iter().map(|g| Generator::new(g.name.clone(), g.degree - k)).collect();
        let differential = if k.rem_euclid(2) == 0 {
            self.differential.clone()
        } else {
            self.ring.normalize(&-&self.differential).expect("negation stays in the ring")
        };
        ChainComplex { ring: self.ring, generators, differential }
    }

    /// Direct sum; generator names get the given prefixes.
    pub fn direct_sum(&self, other: &ChainComplex, prefixes: (&str, &str)) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::Invalid(format!("rings differ: {} vs {}", self.ring, other.ring)));
        }
        let generators = self
            .generators
            .iter()
            .map(|g| Generator::new(format!("{}{}", prefixes.0, g.name), g.degree))
            .chain(other.generators.iter().map(|g| Generator::new(format!("{}{}", prefixes.1, g.name), g.degree)))
            .collect();
        let differential = Matrix::block_diagonal(&[&self.differential, &other.differential]);
        Self::new(self.ring, generators, differential)
    }

    /// Euler characteristic `Σ (−1)^k rank C_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.generators.iter().map(|g| if g.degree.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
    }
}

/// A map `C_k → D_{k+degree}` with `f∂ = (−1)^degree ∂f`.
///
/// `matrix` has one column per source generator and one row per target generator.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    degree: i64,
    matrix: Matrix,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, degree: i64, matrix: Matrix) -> Result<Self> {
        let map = Self::new_unchecked(source, target, degree, matrix)?;
        map.check()?;
        Ok(map)
    }

    /// Validates shape, degrees and ring, but not the chain-map identity.
    pub fn new_unchecked(source: ChainComplex, target: ChainComplex, degree: i64, matrix: Matrix) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::Invalid(format!("rings differ: {} vs {}", source.ring, target.ring)));
        }
        check_degree_rule(&matrix, &source.generators, &target.generators, degree)?;
        let matrix = source.ring.normalize(&matrix)?;
        Ok(ChainMap { source, target, degree, matrix })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        ChainMap { source: c.clone(), target: c.clone(), degree: 0, matrix: Matrix::identity(c.len()) }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, degree: i64) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            matrix: Matrix::zeros(target.len(), source.len()),
        }
    }

    /// The defect `f∂ − (−1)^d ∂f`, zero exactly for chain maps.
    pub fn defect(&self) -> Result<Matrix> {
        let ring = self.source.ring;
        let left = self.matrix.checked_mul(&self.source.differential)?;
        let mut right = self.target.differential.checked_mul(&self.matrix)?;
        if self.degree.rem_euclid(2) == 1 {
            right = -&right;
        }
        ring.normalize(&(&left - &right))
    }

    pub fn check(&self) -> Result<()> {
        let defect = self.defect()?;
        if let Some((i, j, _)) = defect.nonzero_entries().next() {
            return Err(Error::NotAChainMap(format!(
                "identity fails from `{}` to `{}`",
                self.source.generators[j].name, self.target.generators[i].name
            )));
        }
        Ok(())
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `f_k : C_k → D_{k+d}` in the per-degree generator orders.
    pub fn block(&self, k: i64) -> Matrix {
        self.matrix.select(&self.target.indices(k + self.degree), &self.source.indices(k))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target.generators != self.source.generators {
            return Err(Error::Dimension("composed maps do not share a middle complex".into()));
        }
        let matrix = self.source.ring.normalize(&self.matrix.checked_mul(&first.matrix)?)?;
        Ok(ChainMap { source: first.source.clone(), target: self.target.clone(), degree: first.degree + self.degree, matrix })
    }

    /// Same matrix viewed between shifted complexes `C[k] → D[k]`.
    pub fn shift(&self, k: i64) -> ChainMap {
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            degree: self.degree,
            matrix: self.matrix.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// Mapping cone `C(f) = B[1] ⊕ A` of a degree-0 map `f : A → B`, with
/// differential `[[−∂_B, f], [0, ∂_A]]`, together with `0 → B[1] → C(f) → A → 0`.
///
/// A generator `a` of degree `n` keeps degree `n` and is named `A:a`; a
/// generator `b` of degree `n` sits in degree `n − 1` and is named `B:b`.
pub fn cone(f: &ChainMap) -> Result<(ChainComplex, ShortExactSequence)> {
    if f.degree != 0 {
        return Err(Error::Invalid(format!("cone needs a degree-0 map, got degree {}", f.degree)));
    }
    f.check()?;
    let (a, b) = (&f.source, &f.target);
    let ring = a.ring;
    let b_shift = b.shift(1);
    let (nb, na) = (b.len(), a.len());
    let mut generators = Vec::with_capacity(nb + na);
    generators.extend(b_shift.generators.iter().map(|g| Generator::new(format!("B:{}", g.name), g.degree)));
    generators.extend(a.generators.iter().map(|g| Generator::new(format!("A:{}", g.name), g.degree)));
    let mut d = Matrix::zeros(nb + na, nb + na);
    d.insert(0, 0, &b_shift.differential);
    d.insert(0, nb, &f.matrix);
    d.insert(nb, nb, &a.differential);
    let c = ChainComplex::new(ring, generators, d)?;

    let mut incl = Matrix::zeros(nb + na, nb);
    incl.insert(0, 0, &Matrix::identity(nb));
    let mut proj = Matrix::zeros(na, nb + na);
    proj.insert(0, nb, &Matrix::identity(na));
    let u = ChainMap::new(b_shift, c.clone(), 0, incl)?;
    let v = ChainMap::new(c.clone(), a.clone(), 0, proj)?;
    Ok((c, ShortExactSequence::new(u, v)?))
}

/// Linear combination of generators, written `2*x - y`.
pub fn format_chain(gens: &[Generator], v: &[BigRational]) -> String {
    let mut out = String::new();
    for (g, c) in gens.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &BigRational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if abs != BigRational::from_integer(1.into()) {
            out.push_str(&format!("{abs}*"));
        }
        out.push_str(&g.name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times_two(ring: Ring) -> ChainComplex {
        let gens = vec![Generator::new("y", 0), Generator::new("x", 1)];
        ChainComplex::new(ring, gens, Matrix::from_i64_rows(&[vec![0, 2], vec![0, 0]])).unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        let gens = vec![Generator::new("x", 0), Generator::new("x", 1)];
        assert!(ChainComplex::new(Ring::Integers, gens, Matrix::zeros(2, 2)).is_err());
        let gens = vec![Generator::new("x", 0), Generator::new("y", 0)];
        let d = Matrix::from_i64_rows(&[vec![0, 1], vec![0, 0]]);
        assert!(matches!(ChainComplex::new(Ring::Integers, gens, d), Err(Error::Degree { .. })));
    }

    #[test]
    fn detects_nonzero_square() {
        let gens = vec![Generator::new("a", 0), Generator::new("b", 1), Generator::new("c", 2)];
        let d = Matrix::from_i64_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(ChainComplex::new(Ring::Integers, gens, d), Err(Error::NotAComplex { degree: 2 }));
    }

    #[test]
    fn shift_signs_and_degrees() {
        let c = times_two(Ring::Integers);
        assert_eq!(c.shift(0), c);
        let s = c.shift(1);
        assert_eq!(s.generators()[1].degree, 0);
        assert_eq!(s.generators()[0].degree, -1);
        assert_eq!(s.boundary(0), Matrix::from_i64_rows(&[vec![-2]]));
        assert_eq!(c.shift(2).shift(2), c.shift(4));
    }

    #[test]
    fn cone_of_multiplication() {
        let z = ChainComplex::free(Ring::Integers, vec![Generator::new("e", 0)]).unwrap();
        let f = ChainMap::new(z.clone(), z, 0, Matrix::from_i64_rows(&[vec![2]])).unwrap();
        let (c, _) = cone(&f).unwrap();
        assert_eq!(c.generators()[0], Generator::new("B:e", -1));
        assert_eq!(c.generators()[1], Generator::new("A:e", 0));
        assert_eq!(c.boundary(0), Matrix::from_i64_rows(&[vec![2]]));
    }

    #[test]
    fn chain_map_sign_rule() {
        let c = times_two(Ring::Integers);
        // degree 1 map x ↦ 0, y ↦ x needs f∂ = −∂f: f∂(x) = 2x, −∂f(y) = −2y ... not a chain map
        let f = ChainMap::new(c.clone(), c.clone(), 1, Matrix::from_i64_rows(&[vec![0, 0], vec![1, 0]]));
        assert!(f.is_err());
        assert!(ChainMap::new(c.clone(), c.clone(), 0, Matrix::identity(2)).is_ok());
    }

    #[test]
    fn formats_chains() {
        let gens = vec![Generator::new("x", 0), Generator::new("y", 0)];
        let v = vec![BigRational::from_integer(2.into()), BigRational::from_integer((-1).into())];
        assert_eq!(format_chain(&gens, &v), "2*x - y");
    }
}
