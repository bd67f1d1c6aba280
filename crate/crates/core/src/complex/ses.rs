use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::homology::{homology_group, induced_map, HomologyGroup};
use super::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::integer::{integer_kernel, solve_integer, IntegerMatrix};
use crate::linalg::{Matrix, Ring};

/// Exactness of `L --incoming--> M --outgoing--> N` where `M = ⊕ R/mid_orders`
/// and `N = ⊕ R/out_orders` are presented by class coordinates.
///
/// Over a field this is `outgoing∘incoming = 0` plus a rank count; over `Z`
/// it is the lattice inclusion `ker(outgoing) ⊆ im(incoming) + relations(M)`.
pub fn check_exact_at(
    ring: Ring,
    incoming: &Matrix,
    outgoing: &Matrix,
    mid_orders: &[BigInt],
    out_orders: &[BigInt],
) -> Result<bool> {
    let g = mid_orders.len();
    if incoming.rows() != g || outgoing.cols() != g || outgoing.rows() != out_orders.len() {
        return Err(Error::Dimension("exactness check: matrices do not match the groups".into()));
    }
    let composite = ring.reduce_coords(&outgoing.checked_mul(incoming)?, out_orders)?;
    if !composite.is_zero() {
        return Ok(false);
    }
    if ring.is_field() {
        return Ok(ring.rank(incoming)? + ring.rank(outgoing)? == g);
    }
    // ker(outgoing) in Z^g: kernel of [outgoing | diag(out_orders)] projected to the first g coordinates
    let torsion_rows: Vec<usize> = (0..out_orders.len()).filter(|&i| !out_orders[i].is_zero()).collect();
    let mut big = Matrix::zeros(outgoing.rows(), g + torsion_rows.len());
    big.insert(0, 0, outgoing);
    for (c, &i) in torsion_rows.iter().enumerate() {
        big.set(i, g + c, BigRational::from_integer(out_orders[i].clone()));
    }
    let kernel = integer_kernel(&IntegerMatrix::try_from_rational(&big)?);
    let mid_torsion: Vec<usize> = (0..g).filter(|&i| !mid_orders[i].is_zero()).collect();
    let mut lattice = Matrix::zeros(g, incoming.cols() + mid_torsion.len());
    lattice.insert(0, 0, incoming);
    for (c, &i) in mid_torsion.iter().enumerate() {
        lattice.set(i, incoming.cols() + c, BigRational::from_integer(mid_orders[i].clone()));
    }
    let lattice = IntegerMatrix::try_from_rational(&lattice)?;
    for j in 0..kernel.cols() {
        let v: Vec<BigInt> = kernel.column(j).into_iter().take(g).collect();
        if solve_integer(&lattice, &v).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn no_orders(n: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); n]
}

/// `0 → X --u--> Y --v--> Z → 0` of degree-0 chain maps, exact in every degree.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    u: ChainMap,
    v: ChainMap,
}

impl ShortExactSequence {
    pub fn new(u: ChainMap, v: ChainMap) -> Result<Self> {
        if u.degree() != 0 || v.degree() != 0 {
            return Err(Error::NotShortExact("maps must have degree 0".into()));
        }
        if u.target().generators() != v.source().generators() {
            return Err(Error::NotShortExact("u and v do not share the middle complex".into()));
        }
        u.check()?;
        v.check()?;
        let ring = u.source().ring();
        let mut degrees: Vec<i64> = u
            .source()
            .generators()
            .iter()
            .chain(u.target().generators())
            .chain(v.target().generators())
            .map(|g| g.degree)
            .collect();
        degrees.sort();
        degrees.dedup();
        for k in degrees {
            let uk = u.block(k);
            let vk = v.block(k);
            let (nx, ny, nz) = (uk.cols(), uk.rows(), vk.rows());
            let injective = check_exact_at(ring, &Matrix::zeros(nx, 0), &uk, &no_orders(nx), &no_orders(ny))?;
            let middle = check_exact_at(ring, &uk, &vk, &no_orders(ny), &no_orders(nz))?;
            let surjective = check_exact_at(ring, &vk, &Matrix::zeros(0, nz), &no_orders(nz), &[])?;
            if !(injective && middle && surjective) {
                return Err(Error::NotShortExact(format!(
                    "degree {k}: injective {injective}, exact in the middle {middle}, surjective {surjective}"
                )));
            }
        }
        Ok(ShortExactSequence { u, v })
    }

    pub fn u(&self) -> &ChainMap {
        &self.u
    }

    pub fn v(&self) -> &ChainMap {
        &self.v
    }

    pub fn x(&self) -> &ChainComplex {
        self.u.source()
    }

    pub fn y(&self) -> &ChainComplex {
        self.u.target()
    }

    pub fn z(&self) -> &ChainComplex {
        self.v.target()
    }
}

/// Zig-zag connecting map `H_k(Z) → H_{k−1}(X)`: lift along `v`, apply ∂,
/// pull back along `u`.
pub fn connecting_map(s: &ShortExactSequence, hz: &HomologyGroup, hx: &HomologyGroup) -> Result<Matrix> {
    let k = hz.degree;
    if hx.degree != k - 1 {
        return Err(Error::Dimension(format!("connecting map goes H_{k} -> H_{}", k - 1)));
    }
    let ring = s.x().ring();
    let vk = s.v.block(k);
    let u_low = s.u.block(k - 1);
    let dy = s.y().boundary(k);
    let mut columns = Vec::with_capacity(hz.ngens());
    for j in 0..hz.ngens() {
        let z = hz.reps.column(j);
        let y = ring
            .solve(&vk, &z)?
            .ok_or_else(|| Error::NotShortExact(format!("cycle in degree {k} does not lift")))?;
        let boundary = dy.mul_vec(&y);
        let x = ring
            .solve(&u_low, &boundary)?
            .ok_or_else(|| Error::NotShortExact(format!("boundary in degree {} is not in the image of u", k - 1)))?;
        columns.push(hx.coords.mul_vec(&x));
    }
    hx.reduce(&Matrix::from_columns(hx.ngens(), &columns))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Exact,
    NotExact,
    /// A neighbour lies outside the window.
    Unchecked,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesNode {
    pub label: String,
    pub degree: i64,
    pub group: String,
    pub status: NodeStatus,
}

/// The long exact homology sequence of a short exact sequence over a window.
#[derive(Clone, Debug)]
pub struct LesReport {
    pub window: (i64, i64),
    /// Nodes in sequence order: `H_hi(X), H_hi(Y), H_hi(Z), H_{hi−1}(X), …`.
    pub nodes: Vec<LesNode>,
    /// `maps[i]` goes from `nodes[i]` to `nodes[i + 1]`.
    pub maps: Vec<Matrix>,
    pub hx: BTreeMap<i64, HomologyGroup>,
    pub hy: BTreeMap<i64, HomologyGroup>,
    pub hz: BTreeMap<i64, HomologyGroup>,
    /// `connecting[k] : H_k(Z) → H_{k−1}(X)`.
    pub connecting: BTreeMap<i64, Matrix>,
}

impl LesReport {
    pub fn is_exact(&self) -> bool {
        self.nodes.iter().all(|n| n.status != NodeStatus::NotExact)
    }

    pub fn failures(&self) -> Vec<&LesNode> {
        self.nodes.iter().filter(|n| n.status == NodeStatus::NotExact).collect()
    }

    pub fn checked_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.status != NodeStatus::Unchecked).count()
    }
}

/// Long exact sequence with labels `X`, `Y`, `Z`.
pub fn les_from_ses(s: &ShortExactSequence, window: Option<(i64, i64)>) -> Result<LesReport> {
    les_with_labels(s, window, ["X", "Y", "Z"])
}

/// Default window: the joint degree support widened by one on each side,
/// so every node carrying a nonzero group is interior.
pub fn les_with_labels(s: &ShortExactSequence, window: Option<(i64, i64)>, labels: [&str; 3]) -> Result<LesReport> {
    let ring = s.x().ring();
    let window = match window {
        Some(w) => w,
        None => {
            let ranges: Vec<(i64, i64)> = [s.x(), s.y(), s.z()].iter().filter_map(|c| c.degree_range()).collect();
            let lo = ranges.iter().map(|r| r.0).min().unwrap_or(0);
            let hi = ranges.iter().map(|r| r.1).max().unwrap_or(0);
            (lo - 1, hi + 1)
        }
    };
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::Invalid(format!("empty degree window {lo}..{hi}")));
    }
    let mut hx = BTreeMap::new();
    let mut hy = BTreeMap::new();
    let mut hz = BTreeMap::new();
    for k in lo..=hi {
        hx.insert(k, homology_group(s.x(), k)?);
        hy.insert(k, homology_group(s.y(), k)?);
        hz.insert(k, homology_group(s.z(), k)?);
    }
    let mut groups: Vec<(&HomologyGroup, String)> = Vec::new();
    let mut maps = Vec::new();
    let mut connecting = BTreeMap::new();
    for k in (lo..=hi).rev() {
        groups.push((&hx[&k], format!("H_{k}({})", labels[0])));
        groups.push((&hy[&k], format!("H_{k}({})", labels[1])));
        groups.push((&hz[&k], format!("H_{k}({})", labels[2])));
        maps.push(induced_map(&s.u, &hx[&k], &hy[&k])?);
        maps.push(induced_map(&s.v, &hy[&k], &hz[&k])?);
        if k > lo {
            let delta = connecting_map(s, &hz[&k], &hx[&(k - 1)])?;
            connecting.insert(k, delta.clone());
            maps.push(delta);
        }
    }
    let mut nodes = Vec::with_capacity(groups.len());
    for (i, (g, label)) in groups.iter().enumerate() {
        let status = if i == 0 || i + 1 == groups.len() {
            NodeStatus::Unchecked
        } else {
            let next = groups[i + 1].0;
            if check_exact_at(ring, &maps[i - 1], &maps[i], &g.orders, &next.orders)? {
                NodeStatus::Exact
            } else {
                NodeStatus::NotExact
            }
        };
        nodes.push(LesNode { label: label.clone(), degree: g.degree, group: g.to_string(), status });
    }
    Ok(LesReport { window, nodes, maps, hx, hy, hz, connecting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cone, Generator};

    #[test]
    fn exactness_over_integers() {
        // Z --2--> Z --> Z/2 --> 0
        let two = Matrix::from_i64_rows(&[vec![2]]);
        let one = Matrix::from_i64_rows(&[vec![1]]);
        let z = BigInt::zero();
        let t = BigInt::from(2);
        assert!(check_exact_at(Ring::Integers, &two, &one, std::slice::from_ref(&z), std::slice::from_ref(&t)).unwrap());
        // Z --4--> Z --> Z/2: composite vanishes but the kernel (2Z) is not in 4Z
        let four = Matrix::from_i64_rows(&[vec![4]]);
        assert!(!check_exact_at(Ring::Integers, &four, &one, &[z], &[t]).unwrap());
    }

    #[test]
    fn cone_of_two_has_connecting_two() {
        let c = ChainComplex::free(Ring::Integers, vec![Generator::new("e", 0)]).unwrap();
        let f = ChainMap::new(c.clone(), c, 0, Matrix::from_i64_rows(&[vec![2]])).unwrap();
        let (_, ses) = cone(&f).unwrap();
        let les = les_from_ses(&ses, None).unwrap();
        assert!(les.is_exact());
        assert_eq!(les.connecting[&0], Matrix::from_i64_rows(&[vec![2]]));
    }
}
