//! JSON documents for complexes and orbit spectra.
//!
//! Coefficients are strings (`"3"`, `"-1/2"`) so that large values survive.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::complex::{ChainComplex, Generator};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Ring};
use crate::models::{Orbit, OrbitSpectrum, SpectrumEntry};
use crate::s1::S1Complex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub degree: i64,
}

/// A coefficient written as a string or, for convenience, a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Text(String),
    Int(i64),
}

impl Coeff {
    pub fn parse(&self) -> Result<BigRational> {
        match self {
            Coeff::Int(n) => Ok(BigRational::from_integer((*n).into())),
            Coeff::Text(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let q = match s.split_once('/') {
        Some((n, d)) => {
            let n = num_bigint::BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
            let d = num_bigint::BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(
            num_bigint::BigInt::from_str(s).map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?,
        ),
    };
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryFile {
    pub from: String,
    pub to: String,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiLevel {
    pub level: usize,
    pub entries: Vec<EntryFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub differential: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<PhiLevel>,
}

fn ring_of(ring: &str, p: Option<u64>) -> Result<Ring> {
    match (ring, p) {
        ("Fp" | "F_p" | "GF(p)", Some(p)) => Ring::from_str(&format!("F{p}")),
        ("Fp" | "F_p" | "GF(p)", None) => Err(Error::Parse("ring `Fp` needs the field `p`".into())),
        (r, _) => Ring::from_str(r),
    }
}

fn entries_to_matrix(
    entries: &[EntryFile],
    names: &HashMap<&str, usize>,
    n: usize,
    location: &str,
) -> Result<Matrix> {
    let mut m = Matrix::zeros(n, n);
    for (i, e) in entries.iter().enumerate() {
        let find = |name: &str| {
            names
                .get(name)
                .copied()
                .ok_or_else(|| Error::Parse(format!("{location}[{i}]: unknown generator `{name}`")))
        };
        let (from, to) = (find(&e.from)?, find(&e.to)?);
        let c = e.coeff.parse().map_err(|err| Error::Parse(format!("{location}[{i}]: {err}")))?;
        m.add_to(to, from, &c);
    }
    Ok(m)
}

fn matrix_to_entries(m: &Matrix, gens: &[Generator]) -> Vec<EntryFile> {
    let mut out: Vec<(usize, usize, EntryFile)> = m
        .nonzero_entries()
        .map(|(row, col, c)| {
            (col, row, EntryFile { from: gens[col].name.clone(), to: gens[row].name.clone(), coeff: Coeff::Text(c.to_string()) })
        })
        .collect();
    out.sort_by_key(|(c, r, _)| (*c, *r));
    out.into_iter().map(|(_, _, e)| e).collect()
}

impl ComplexFile {
    /// Reads the data without checking `∂² = 0` or the multicomplex relations.
    /// Generators are sorted by degree, then name.
    pub fn to_unchecked(&self) -> Result<S1Complex> {
        let ring = ring_of(&self.ring, self.p)?;
        let mut gens: Vec<Generator> = self.generators.iter().map(|g| Generator::new(g.name.clone(), g.degree)).collect();
        gens.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.name.cmp(&b.name)));
        let mut names = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if names.insert(g.name.as_str(), i).is_some() {
                return Err(Error::Parse(format!("duplicate generator `{}`", g.name)));
            }
        }
        let n = gens.len();
        let d = entries_to_matrix(&self.differential, &names, n, "differential")?;
        let mut levels = BTreeSet::new();
        let mut phis = Vec::new();
        for (i, level) in self.phi.iter().enumerate() {
            if level.level == 0 {
                return Err(Error::Parse(format!("phi[{i}]: level must be at least 1")));
            }
            if !levels.insert(level.level) {
                return Err(Error::Parse(format!("phi[{i}]: level {} repeated", level.level)));
            }
            if phis.len() < level.level {
                phis.resize(level.level, Matrix::zeros(n, n));
            }
            phis[level.level - 1] = entries_to_matrix(&level.entries, &names, n, &format!("phi[{i}].entries"))?;
        }
        let base = ChainComplex::new_unchecked(ring, gens.clone(), d)?;
        S1Complex::new_unchecked(base, phis)
    }

    /// Reads and validates the complex.
    pub fn to_complex(&self) -> Result<S1Complex> {
        let c = self.to_unchecked()?;
        if let Some(k) = c.verify_relations()?.first_failure() {
            return Err(Error::Relation(k));
        }
        Ok(c)
    }

    pub fn from_complex(c: &S1Complex) -> Self {
        let (ring, p) = match c.ring() {
            Ring::Prime(p) => ("Fp".to_string(), Some(p)),
            r => (r.to_string(), None),
        };
        let gens = c.generators();
        ComplexFile {
            ring,
            p,
            generators: gens.iter().map(|g| GeneratorEntry { name: g.name.clone(), degree: g.degree }).collect(),
            differential: matrix_to_entries(c.base().differential(), gens),
            phi: c
                .higher()
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_zero())
                .map(|(i, m)| PhiLevel { level: i + 1, entries: matrix_to_entries(m, gens) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub name: String,
    pub degree: i64,
    pub multiplicity: i64,
    pub good: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub orbits: Vec<OrbitEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d1: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d2: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d1_bad_m: Vec<EntryFile>,
}

fn spectrum_entries(list: &[EntryFile], location: &str) -> Result<Vec<SpectrumEntry>> {
    list.iter()
        .enumerate()
        .map(|(i, e)| {
            let coeff = e.coeff.parse().map_err(|err| Error::Parse(format!("{location}[{i}]: {err}")))?;
            Ok(SpectrumEntry { from: e.from.clone(), to: e.to.clone(), coeff })
        })
        .collect()
}

fn file_entries(list: &[SpectrumEntry]) -> Vec<EntryFile> {
    list.iter()
        .map(|e| EntryFile { from: e.from.clone(), to: e.to.clone(), coeff: Coeff::Text(e.coeff.to_string()) })
        .collect()
}

impl SpectrumFile {
    pub fn to_spectrum(&self) -> Result<OrbitSpectrum> {
        let s = OrbitSpectrum {
            orbits: self.orbits.iter().map(|o| Orbit::new(o.name.clone(), o.degree, o.multiplicity, o.good)).collect(),
            d1: spectrum_entries(&self.d1, "d1")?,
            d2: spectrum_entries(&self.d2, "d2")?,
            d1_bad_m: spectrum_entries(&self.d1_bad_m, "d1_bad_m")?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_spectrum(s: &OrbitSpectrum) -> Self {
        SpectrumFile {
            orbits: s
                .orbits
                .iter()
                .map(|o| OrbitEntry { name: o.name.clone(), degree: o.degree, multiplicity: o.multiplicity, good: o.good })
                .collect(),
            d1: file_entries(&s.d1),
            d2: file_entries(&s.d2),
            d1_bad_m: file_entries(&s.d1_bad_m),
        }
    }
}

pub fn parse_complex(text: &str) -> Result<ComplexFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("complex file: {e}")))
}

pub fn parse_spectrum(text: &str) -> Result<SpectrumFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("spectrum file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{model_ck, sphere_spectrum};

    #[test]
    fn complex_round_trip() {
        let c = model_ck(3, Ring::Integers).unwrap();
        let file = ComplexFile::from_complex(&c);
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(parse_complex(&text).unwrap().to_complex().unwrap(), c);
    }

    #[test]
    fn prime_ring_and_rationals() {
        let text = r#"{"ring":"Fp","p":5,"generators":[{"name":"x","degree":1},{"name":"y","degree":0}],
            "differential":[{"from":"x","to":"y","coeff":"7/2"}]}"#;
        let c = parse_complex(text).unwrap().to_complex().unwrap();
        assert_eq!(c.ring(), Ring::Prime(5));
        assert_eq!(c.generators()[0].name, "y");
        // 7/2 = 7·3 = 1 mod 5
        assert_eq!(c.base().differential().get(0, 1), &crate::linalg::rational(1));
    }

    #[test]
    fn errors_carry_locations() {
        let text = r#"{"ring":"Q","generators":[{"name":"x","degree":1}],
            "differential":[{"from":"x","to":"z","coeff":"1"}]}"#;
        let err = parse_complex(text).unwrap().to_complex().unwrap_err();
        assert!(err.to_string().contains("differential[0]"), "{err}");
        let err = parse_complex("{\"ring\": \"Q\",\n \"generators\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn broken_relation_is_reported() {
        let text = r#"{"ring":"Z","generators":[{"name":"1","degree":0},{"name":"a","degree":1}],
            "phi":[{"level":1,"entries":[{"from":"1","to":"a","coeff":"1"},{"from":"a","to":"1","coeff":"0"}]},
                   {"level":2,"entries":[]}]}"#;
        assert!(parse_complex(text).unwrap().to_complex().is_ok());
        let text = r#"{"ring":"Z","generators":[{"name":"x","degree":0},{"name":"y","degree":1},{"name":"z","degree":2}],
            "phi":[{"level":1,"entries":[{"from":"x","to":"y","coeff":"1"},{"from":"y","to":"z","coeff":"1"}]}]}"#;
        assert_eq!(parse_complex(text).unwrap().to_complex().unwrap_err(), Error::Relation(2));
    }

    #[test]
    fn spectrum_round_trip() {
        let s = sphere_spectrum(3, 12).unwrap();
        let file = SpectrumFile::from_spectrum(&s);
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(parse_spectrum(&text).unwrap().to_spectrum().unwrap(), s);
    }
}
