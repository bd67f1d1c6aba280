use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::HomologyResult;
use crate::error::{Error, Result};

/// A finitely generated abelian group `ℤ^free ⊕ ⊕ ℤ/tᵢ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl GroupSummary {
    pub fn free(rank: usize) -> Self {
        GroupSummary { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    fn add(&mut self, other: &GroupSummary) {
        self.free_rank += other.free_rank;
        self.torsion.extend(other.torsion.iter().copied());
        self.torsion.sort();
    }
}

impl fmt::Display for GroupSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Degree-indexed groups; absent degrees are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroup {
    pub groups: BTreeMap<i64, GroupSummary>,
}

impl GradedGroup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, degree: i64, group: GroupSummary) -> Self {
        self.add(degree, &group);
        self
    }

    pub fn add(&mut self, degree: i64, group: &GroupSummary) {
        if group.is_zero() {
            return;
        }
        self.groups.entry(degree).or_default().add(group);
    }

    pub fn get(&self, degree: i64) -> GroupSummary {
        self.groups.get(&degree).cloned().unwrap_or_default()
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.groups.get(&degree).map_or(0, |g| g.free_rank)
    }

    pub fn support(&self) -> Vec<i64> {
        self.groups.iter().filter(|(_, g)| !g.is_zero()).map(|(&k, _)| k).collect()
    }

    pub fn from_homology(h: &HomologyResult) -> Result<Self> {
        let mut out = GradedGroup::new();
        for (&k, g) in &h.groups {
            let torsion = g
                .torsion()
                .iter()
                .map(|t| u64::try_from(t).map_err(|_| Error::Unsupported(format!("torsion {t} exceeds 64 bits"))))
                .collect::<Result<Vec<_>>>()?;
            out.add(k, &GroupSummary { free_rank: g.free_rank(), torsion });
        }
        Ok(out)
    }
}

/// `H_*(W, ∂W)` of a filling of dimension `2n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingHomology {
    pub n: i64,
    pub groups: GradedGroup,
}

impl FillingHomology {
    /// The ball `B^{2n}`: `H_{2n}(B, ∂B) = ℤ`.
    pub fn ball(n: i64) -> Self {
        FillingHomology { n, groups: GradedGroup::new().with(2 * n, GroupSummary::free(1)) }
    }
}

/// `⊕_{k≥0} H_{*+n−1−2k}(W, ∂W)` in degrees `* ≤ cutoff`.
pub fn subcritical_sh(f: &FillingHomology, cutoff: i64) -> GradedGroup {
    let mut out = GradedGroup::new();
    for (&d, g) in &f.groups.groups {
        let mut star = d - f.n + 1;
        while star <= cutoff {
            out.add(star, g);
            star += 2;
        }
    }
    out
}

/// `(h ⊗ H_*(BS¹))_d = ⊕_{ℓ≥0} h_{d−2ℓ}` in degrees `d ≤ cutoff`.
pub fn tensor_with_bs1(h: &GradedGroup, cutoff: i64) -> GradedGroup {
    let mut out = GradedGroup::new();
    for (&d, g) in &h.groups {
        let mut k = d;
        while k <= cutoff {
            out.add(k, g);
            k += 2;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_gives_odd_degrees_from_n_plus_one() {
        let out = subcritical_sh(&FillingHomology::ball(2), 11);
        assert_eq!(out.support(), vec![3, 5, 7, 9, 11]);
        assert!(subcritical_sh(&FillingHomology { n: 3, groups: GradedGroup::new() }, 20).support().is_empty());
    }

    #[test]
    fn two_sources_overlap() {
        let f = FillingHomology {
            n: 2,
            groups: GradedGroup::new().with(2, GroupSummary::free(2)).with(4, GroupSummary::free(1)),
        };
        let out = subcritical_sh(&f, 7);
        assert_eq!(out.rank(1), 2);
        assert_eq!(out.rank(3), 3);
        assert_eq!(out.rank(7), 3);
        assert_eq!(out.rank(2), 0);
    }

    #[test]
    fn tensor_with_torsion() {
        let h = GradedGroup::new().with(1, GroupSummary { free_rank: 0, torsion: vec![3] });
        let out = tensor_with_bs1(&h, 9);
        assert_eq!(out.support(), vec![1, 3, 5, 7, 9]);
        assert_eq!(out.get(5).to_string(), "Z/3");
    }
}
