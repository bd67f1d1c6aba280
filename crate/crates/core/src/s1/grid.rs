use std::collections::BTreeMap;

use serde::Serialize;

use super::equivariant::{build, gysin_ses, GysinSes};
use super::maps::{tilde_map, S1ChainMap};
use super::S1Complex;
use crate::complex::{
    connecting_map, homology_group, induced_map, ChainComplex, ChainMap, HomologyGroup, ShortExactSequence,
};
use crate::error::{Error, Result};
use crate::linalg::{rational, Matrix};

#[derive(Clone, Debug, Serialize)]
pub struct GridSquare {
    pub name: String,
    /// Degree of the top-left corner.
    pub degree: i64,
    pub holds: bool,
    /// The square is only required to anti-commute.
    pub anti: bool,
    /// Both corners where the square starts and ends are nonzero.
    pub nontrivial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub window: (i64, i64),
    pub squares: Vec<GridSquare>,
}

impl GridReport {
    pub fn all_hold(&self) -> bool {
        self.squares.iter().all(|s| s.holds)
    }

    pub fn failures(&self) -> Vec<&GridSquare> {
        self.squares.iter().filter(|s| !s.holds).collect()
    }

    /// Anti-commutative squares checked between nonzero groups.
    pub fn nontrivial_anti_squares(&self) -> usize {
        self.squares.iter().filter(|s| s.anti && s.nontrivial).count()
    }
}

/// An `S¹`-subcomplex, the quotient `S¹`-complex and the grid check.
#[derive(Clone, Debug)]
pub struct QuotientData {
    pub sub: S1Complex,
    pub quotient: S1Complex,
    pub sub_indices: Vec<usize>,
    pub quotient_indices: Vec<usize>,
    pub grid: GridReport,
}

fn check_invariant(c: &S1Complex, sub: &[usize], rest: &[usize]) -> Result<()> {
    for i in 0..=c.max_index() {
        let phi = c.phi(i);
        for &col in sub {
            for &row in rest {
                if !num_traits::Zero::is_zero(phi.get(row, col)) {
                    return Err(Error::Invalid(format!(
                        "subset is not invariant: φ{i} sends `{}` to `{}`",
                        c.generators()[col].name,
                        c.generators()[row].name
                    )));
                }
            }
        }
    }
    Ok(())
}

fn selection(rows: usize, picks: &[usize], transpose: bool) -> Matrix {
    // inclusion: rows = ambient, column j = e_{picks[j]}
    let mut m = Matrix::zeros(rows, picks.len());
    for (j, &i) in picks.iter().enumerate() {
        m.set(i, j, rational(1));
    }
    if transpose {
        m.transpose()
    } else {
        m
    }
}

/// Groups of one complex, cached by degree.
struct Groups {
    cache: BTreeMap<i64, HomologyGroup>,
}

impl Groups {
    fn new(complex: &ChainComplex, lo: i64, hi: i64) -> Result<Self> {
        let mut cache = BTreeMap::new();
        for k in lo..=hi {
            cache.insert(k, homology_group(complex, k)?);
        }
        Ok(Groups { cache })
    }

    fn at(&self, k: i64) -> &HomologyGroup {
        &self.cache[&k]
    }
}

/// Row of the grid: a Gysin sequence `X → Y → Z` with homology groups.
struct Row<'a> {
    ses: &'a ShortExactSequence,
    x: Groups,
    y: Groups,
    z: Groups,
}

fn composite_equal(target: &HomologyGroup, a: &Matrix, b: &Matrix, anti: bool) -> Result<bool> {
    let diff = if anti { a + b } else { a - b };
    Ok(target.reduce(&diff)?.is_zero())
}

/// Splits `c` along the invariant subset `sub` (base generator indices) and
/// checks the homology grid formed by the three Gysin sequences and the
/// three column sequences, in degrees `min − 1 ..= max_degree`.
pub fn quotient(c: &S1Complex, sub: &[usize], max_degree: i64) -> Result<QuotientData> {
    if let Some(k) = c.verify_relations()?.first_failure() {
        return Err(Error::Relation(k));
    }
    let n = c.len();
    let mut sub_indices: Vec<usize> = sub.to_vec();
    sub_indices.sort();
    sub_indices.dedup();
    if sub_indices.iter().any(|&i| i >= n) {
        return Err(Error::Invalid("subset index out of range".into()));
    }
    let quotient_indices: Vec<usize> = (0..n).filter(|i| !sub_indices.contains(i)).collect();
    check_invariant(c, &sub_indices, &quotient_indices)?;
    let a = c.restrict(&sub_indices)?;
    let q = c.restrict(&quotient_indices)?;

    let (min, top) = c.base().degree_range().unwrap_or((0, 0));
    let max_degree = max_degree.max(min);
    let built_to = max_degree.max(top) + 1;
    let rows_data: Vec<GysinSes> = [&a, c, &q]
        .iter()
        .map(|s| gysin_ses(s, build(s, built_to)?))
        .collect::<Result<_>>()?;

    // column maps: inclusion A → C and projection C → C/A, at the three levels
    let incl = selection(n, &sub_indices, false);
    let proj = selection(n, &quotient_indices, true);
    let incl_s1 = S1ChainMap::new(a.clone(), c.clone(), vec![incl.clone()])?;
    let proj_s1 = S1ChainMap::new(c.clone(), q.clone(), vec![proj.clone()])?;
    let col_x = ShortExactSequence::new(
        ChainMap::new(a.base().clone(), c.base().clone(), 0, incl)?,
        ChainMap::new(c.base().clone(), q.base().clone(), 0, proj)?,
    )?;
    let col_y = ShortExactSequence::new(
        tilde_map(&incl_s1, &rows_data[0].full, &rows_data[1].full)?,
        tilde_map(&proj_s1, &rows_data[1].full, &rows_data[2].full)?,
    )?;
    let col_z = ShortExactSequence::new(
        tilde_map(&incl_s1, &rows_data[0].lower, &rows_data[1].lower)?.shift(-2),
        tilde_map(&proj_s1, &rows_data[1].lower, &rows_data[2].lower)?.shift(-2),
    )?;

    let lo = min - 1;
    let hi = max_degree;
    let rows: Vec<Row> = rows_data
        .iter()
        .map(|g| {
            Ok(Row {
                ses: &g.ses,
                x: Groups::new(g.ses.x(), lo - 2, hi)?,
                y: Groups::new(g.ses.y(), lo - 2, hi)?,
                z: Groups::new(g.ses.z(), lo - 2, hi)?,
            })
        })
        .collect::<Result<_>>()?;
    let mut squares = Vec::new();
    let mut push = |name: &str, degree: i64, holds: bool, anti: bool, nontrivial: bool| {
        squares.push(GridSquare { name: name.to_string(), degree, holds, anti, nontrivial });
    };
    let cols = [&col_x, &col_y, &col_z];
    for k in lo..=hi {
        // rows r → r+1 through the column maps (first the inclusions, then the projections)
        for (r, pick) in [(0usize, 0usize), (1, 1)] {
            let (top, bottom) = (&rows[r], &rows[r + 1]);
            let vertical = |col: usize| if pick == 0 { cols[col].u() } else { cols[col].v() };
            let tag = if pick == 0 { "inclusion" } else { "projection" };
            // u-square: H_k(X_r) → H_k(Y_{r+1})
            let lhs = induced_map(vertical(1), top.y.at(k), bottom.y.at(k))?
                .checked_mul(&induced_map(top.ses.u(), top.x.at(k), top.y.at(k))?)?;
            let rhs = induced_map(bottom.ses.u(), bottom.x.at(k), bottom.y.at(k))?
                .checked_mul(&induced_map(vertical(0), top.x.at(k), bottom.x.at(k))?)?;
            let nt = !top.x.at(k).is_zero() && !bottom.y.at(k).is_zero();
            push(&format!("{tag}/I"), k, composite_equal(bottom.y.at(k), &lhs, &rhs, false)?, false, nt);
            // v-square: H_k(Y_r) → H_k(Z_{r+1})
            let lhs = induced_map(vertical(2), top.z.at(k), bottom.z.at(k))?
                .checked_mul(&induced_map(top.ses.v(), top.y.at(k), top.z.at(k))?)?;
            let rhs = induced_map(bottom.ses.v(), bottom.y.at(k), bottom.z.at(k))?
                .checked_mul(&induced_map(vertical(1), top.y.at(k), bottom.y.at(k))?)?;
            let nt = !top.y.at(k).is_zero() && !bottom.z.at(k).is_zero();
            push(&format!("{tag}/S"), k, composite_equal(bottom.z.at(k), &lhs, &rhs, false)?, false, nt);
            // δ-square: H_k(Z_r) → H_{k−1}(X_{r+1})
            let lhs = induced_map(vertical(0), top.x.at(k - 1), bottom.x.at(k - 1))?
                .checked_mul(&connecting_map(top.ses, top.z.at(k), top.x.at(k - 1))?)?;
            let rhs = connecting_map(bottom.ses, bottom.z.at(k), bottom.x.at(k - 1))?
                .checked_mul(&induced_map(vertical(2), top.z.at(k), bottom.z.at(k))?)?;
            let nt = !top.z.at(k).is_zero() && !bottom.x.at(k - 1).is_zero();
            push(&format!("{tag}/B"), k, composite_equal(bottom.x.at(k - 1), &lhs, &rhs, false)?, false, nt);
        }
        // bottom row back to the top row through the column connecting maps
        let (top, bottom) = (&rows[2], &rows[0]);
        let lhs = connecting_map(&col_y, top.y.at(k), bottom.y.at(k - 1))?
            .checked_mul(&induced_map(top.ses.u(), top.x.at(k), top.y.at(k))?)?;
        let rhs = induced_map(bottom.ses.u(), bottom.x.at(k - 1), bottom.y.at(k - 1))?
            .checked_mul(&connecting_map(&col_x, top.x.at(k), bottom.x.at(k - 1))?)?;
        let nt = !top.x.at(k).is_zero() && !bottom.y.at(k - 1).is_zero();
        push("connecting/I", k, composite_equal(bottom.y.at(k - 1), &lhs, &rhs, false)?, false, nt);
        let lhs = connecting_map(&col_z, top.z.at(k), bottom.z.at(k - 1))?
            .checked_mul(&induced_map(top.ses.v(), top.y.at(k), top.z.at(k))?)?;
        let rhs = induced_map(bottom.ses.v(), bottom.y.at(k - 1), bottom.z.at(k - 1))?
            .checked_mul(&connecting_map(&col_y, top.y.at(k), bottom.y.at(k - 1))?)?;
        let nt = !top.y.at(k).is_zero() && !bottom.z.at(k - 1).is_zero();
        push("connecting/S", k, composite_equal(bottom.z.at(k - 1), &lhs, &rhs, false)?, false, nt);
        // ∂_X ∂'' + ∂ ∂_Z = 0 on H_k(Z'') → H_{k−2}(X)
        let lhs = connecting_map(&col_x, top.x.at(k - 1), bottom.x.at(k - 2))?
            .checked_mul(&connecting_map(top.ses, top.z.at(k), top.x.at(k - 1))?)?;
        let rhs = connecting_map(bottom.ses, bottom.z.at(k - 1), bottom.x.at(k - 2))?
            .checked_mul(&connecting_map(&col_z, top.z.at(k), bottom.z.at(k - 1))?)?;
        let nt = !top.z.at(k).is_zero() && !bottom.x.at(k - 2).is_zero();
        push("connecting/B", k, composite_equal(bottom.x.at(k - 2), &lhs, &rhs, true)?, true, nt);
    }
    Ok(QuotientData {
        sub: a,
        quotient: q,
        sub_indices,
        quotient_indices,
        grid: GridReport { window: (lo, hi), squares },
    })
}
