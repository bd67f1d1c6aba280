use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Ring};

/// `H_k` as `⊕ R/orders[i]` (order 0 = free), with cycle representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyGroup {
    pub degree: i64,
    pub ring: Ring,
    pub orders: Vec<BigInt>,
    /// One column per generator, in the degree-`k` generator order.
    pub reps: Matrix,
    /// Sends a degree-`k` cycle to its (unreduced) class coordinates.
    pub coords: Matrix,
}

impl HomologyGroup {
    pub fn zero(ring: Ring, degree: i64, chain_rank: usize) -> Self {
        HomologyGroup {
            degree,
            ring,
            orders: Vec::new(),
            reps: Matrix::zeros(chain_rank, 0),
            coords: Matrix::zeros(0, chain_rank),
        }
    }

    /// Number of cyclic summands.
    pub fn ngens(&self) -> usize {
        self.orders.len()
    }

    pub fn free_rank(&self) -> usize {
        self.orders.iter().filter(|o| o.is_zero()).count()
    }

    /// Torsion coefficients in increasing order (always empty over a field).
    pub fn torsion(&self) -> Vec<BigInt> {
        let mut t: Vec<BigInt> = self.orders.iter().filter(|o| !o.is_zero()).cloned().collect();
        t.sort();
        t
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    /// Class of a cycle, reduced modulo the orders.
    pub fn class_of(&self, cycle: &[BigRational]) -> Result<Vec<BigRational>> {
        let v = self.coords.mul_vec(cycle);
        let m = Matrix::from_columns(v.len(), &[v]);
        Ok(self.ring.reduce_coords(&m, &self.orders)?.column(0))
    }

    /// Reduces a matrix whose columns are class coordinates.
    pub fn reduce(&self, m: &Matrix) -> Result<Matrix> {
        self.ring.reduce_coords(m, &self.orders)
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        let free = self.free_rank();
        if free > 0 {
            parts.push(format!("{}^{}", self.ring, free));
        }
        for t in self.torsion() {
            parts.push(format!("{}/{}", self.ring, t));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSummary {
    pub degree: i64,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub display: String,
}

/// Homology over a window of degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyResult {
    pub ring: Ring,
    pub groups: BTreeMap<i64, HomologyGroup>,
}

impl HomologyResult {
    pub fn group(&self, k: i64) -> Option<&HomologyGroup> {
        self.groups.get(&k)
    }

    /// Free rank in degree `k` (dimension over a field), 0 outside the window.
    pub fn rank(&self, k: i64) -> usize {
        self.groups.get(&k).map_or(0, HomologyGroup::free_rank)
    }

    pub fn torsion(&self, k: i64) -> Vec<BigInt> {
        self.groups.get(&k).map_or_else(Vec::new, HomologyGroup::torsion)
    }

    pub fn is_zero(&self) -> bool {
        self.groups.values().all(HomologyGroup::is_zero)
    }

    /// Degrees in the window with a nonzero group.
    pub fn support(&self) -> Vec<i64> {
        self.groups.iter().filter(|(_, g)| !g.is_zero()).map(|(&k, _)| k).collect()
    }

    pub fn summary(&self) -> Vec<DegreeSummary> {
        self.groups
            .values()
            .map(|g| DegreeSummary {
                degree: g.degree,
                free_rank: g.free_rank(),
                torsion: g.torsion().iter().map(ToString::to_string).collect(),
                display: g.to_string(),
            })
            .collect()
    }
}

/// `H_k(C)` with representatives.
pub fn homology_group(c: &ChainComplex, k: i64) -> Result<HomologyGroup> {
    let d_out = c.boundary(k);
    let d_in = c.boundary(k + 1);
    let data = c.ring().homology(&d_out, &d_in)?;
    Ok(HomologyGroup { degree: k, ring: c.ring(), orders: data.orders, reps: data.reps, coords: data.coords })
}

/// Homology in the degrees `lo..=hi`; `None` means the full support.
pub fn homology(c: &ChainComplex, window: Option<(i64, i64)>) -> Result<HomologyResult> {
    let mut groups = BTreeMap::new();
    let window = match window {
        Some(w) => Some(w),
        None => c.degree_range(),
    };
    if let Some((lo, hi)) = window {
        if lo > hi {
            return Err(Error::Invalid(format!("empty degree window {lo}..{hi}")));
        }
        for k in lo..=hi {
            groups.insert(k, homology_group(c, k)?);
        }
    }
    Ok(HomologyResult { ring: c.ring(), groups })
}

/// Matrix of `H_k(A) → H_{k+d}(B)` in the given representative bases.
pub fn induced_map(f: &ChainMap, from: &HomologyGroup, to: &HomologyGroup) -> Result<Matrix> {
    if to.degree != from.degree + f.degree() {
        return Err(Error::Degree {
            from: format!("H_{}", from.degree),
            to: format!("H_{}", to.degree),
            reason: format!("map has degree {}", f.degree()),
        });
    }
    let image = f.block(from.degree).checked_mul(&from.reps)?;
    to.reduce(&to.coords.checked_mul(&image)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;

    fn times_two(ring: Ring) -> ChainComplex {
        let gens = vec![Generator::new("y", 0), Generator::new("x", 1)];
        ChainComplex::new(ring, gens, Matrix::from_i64_rows(&[vec![0, 2], vec![0, 0]])).unwrap()
    }

    #[test]
    fn times_two_over_each_ring() {
        let h = homology(&times_two(Ring::Integers), None).unwrap();
        assert_eq!(h.group(0).unwrap().to_string(), "Z/2");
        assert!(h.group(1).unwrap().is_zero());
        assert!(homology(&times_two(Ring::Rationals), None).unwrap().is_zero());
        let h2 = homology(&times_two(Ring::Prime(2)), None).unwrap();
        assert_eq!(h2.rank(0), 1);
        assert_eq!(h2.rank(1), 1);
    }

    #[test]
    fn multiplication_by_three_is_induced() {
        let c = ChainComplex::free(Ring::Integers, vec![Generator::new("e", 0)]).unwrap();
        let f = ChainMap::new(c.clone(), c.clone(), 0, Matrix::from_i64_rows(&[vec![3]])).unwrap();
        let h = homology_group(&c, 0).unwrap();
        assert_eq!(induced_map(&f, &h, &h).unwrap(), Matrix::from_i64_rows(&[vec![3]]));
        let id = ChainMap::identity(&c);
        assert_eq!(induced_map(&id, &h, &h).unwrap(), Matrix::identity(1));
    }
}
