use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use s1chains::complex::{cone, homology, les_from_ses, ChainMap, HomologyResult, LesNode};
use s1chains::io::{parse_complex, parse_spectrum, ComplexFile, EntryFile, SpectrumFile};
use s1chains::linalg::{Matrix, Ring};
use s1chains::models::{
    model_cbad, model_ck, mu_filtration_check, random_invariant_pair, random_multicomplex, random_spectrum,
    sc_from_spectrum, sphere_spectrum, subcritical_sh, tensor_with_bs1, vanishing_check, verify_pi_iso,
    FillingHomology, GradedGroup, OrbitSpectrum, RandomParams, SpectrumParams,
};
use s1chains::s1::{equivariant, gysin_les, quotient, S1Complex};
use s1chains::spectral::{check_convergence, check_e2_gysin, compute_pages, FilteredComplex};

use crate::output::{read_file, read_input, table, yes_no, CliError, CliResult, Report};

pub fn parse_ring(s: &str) -> Result<Ring, String> {
    s.parse().map_err(|e: s1chains::Error| e.to_string())
}

#[derive(Args, Debug)]
pub struct ComplexInput {
    /// Complex file in JSON; `-` or absent reads stdin.
    pub input: Option<PathBuf>,
    /// Change coefficients before computing.
    #[arg(long, value_parser = parse_ring)]
    pub ring: Option<Ring>,
}

impl ComplexInput {
    fn load(&self) -> CliResult<S1Complex> {
        let text = read_input(self.input.as_deref())?;
        let c = parse_complex(&text)?.to_complex()?;
        Ok(match self.ring {
            Some(r) => c.with_ring(r)?,
            None => c,
        })
    }
}

fn load_spectrum(input: Option<&std::path::Path>) -> CliResult<OrbitSpectrum> {
    let text = read_input(input)?;
    Ok(parse_spectrum(&text)?.to_spectrum()?)
}

fn lowest_degree(c: &S1Complex) -> i64 {
    c.base().degree_range().map_or(0, |(lo, _)| lo.min(0))
}

fn homology_rows(h: &HomologyResult) -> Vec<Vec<String>> {
    h.groups.iter().map(|(k, g)| vec![k.to_string(), g.to_string()]).collect()
}

fn homology_json(h: &HomologyResult) -> Value {
    json!({ "ring": h.ring.to_string(), "groups": h.summary() })
}

#[derive(Args, Debug)]
pub struct HomologyArgs {
    #[command(flatten)]
    pub complex: ComplexInput,
    #[arg(long)]
    pub min_degree: Option<i64>,
    #[arg(long)]
    pub max_degree: Option<i64>,
}

pub fn run_homology(a: &HomologyArgs) -> CliResult<Report> {
    let c = a.complex.load()?;
    let window = match (c.base().degree_range(), a.min_degree, a.max_degree) {
        (Some((lo, hi)), min, max) => Some((min.unwrap_or(lo), max.unwrap_or(hi))),
        (None, Some(lo), Some(hi)) => Some((lo, hi)),
        (None, ..) => None,
    };
    let h = homology(c.base(), window)?;
    let text = format!("H over {}\n{}", h.ring, table(&["degree", "group"], &homology_rows(&h)));
    Ok(Report::new(homology_json(&h), text))
}

#[derive(Args, Debug)]
pub struct EquivariantArgs {
    #[command(flatten)]
    pub complex: ComplexInput,
    #[arg(long)]
    pub min_degree: Option<i64>,
    #[arg(long, default_value_t = 20)]
    pub max_degree: i64,
}

pub fn run_equivariant(a: &EquivariantArgs) -> CliResult<Report> {
    let c = a.complex.load()?;
    let lo = a.min_degree.unwrap_or_else(|| lowest_degree(&c));
    if lo > a.max_degree {
        return Err(CliError::Usage(format!("empty window {lo}..{}", a.max_degree)));
    }
    let h = equivariant(&c, a.max_degree)?.homology(lo, a.max_degree)?;
    let text = format!(
        "H^{{S1}} over {}, degrees {lo}..{}\n{}",
        h.ring,
        a.max_degree,
        table(&["degree", "group"], &homology_rows(&h))
    );
    Ok(Report::new(json!({ "window": [lo, a.max_degree], "homology": homology_json(&h) }), text))
}

fn les_rows(nodes: &[LesNode]) -> Vec<Vec<String>> {
    nodes
        .iter()
        .map(|n| vec![n.label.clone(), n.degree.to_string(), n.group.clone(), format!("{:?}", n.status).to_lowercase()])
        .collect()
}

#[derive(Args, Debug)]
pub struct GysinArgs {
    #[command(flatten)]
    pub complex: ComplexInput,
    #[arg(long, default_value_t = 12)]
    pub max_degree: i64,
}

pub fn run_gysin(a: &GysinArgs) -> CliResult<Report> {
    let c = a.complex.load()?;
    let r = gysin_les(&c, a.max_degree)?;
    let passed = r.exact() && r.connecting_is_b();
    let json = json!({
        "window": r.les.window,
        "exact": r.exact(),
        "connecting_is_b": r.connecting_is_b(),
        "nodes": r.les.nodes,
        "connecting_vs_b": r.connecting_vs_b,
    });
    let text = format!(
        "Gysin sequence, degrees {}..{}\n{}\nexact: {}\nconnecting map equals B: {}",
        r.les.window.0,
        r.les.window.1,
        table(&["node", "degree", "group", "status"], &les_rows(&r.les.nodes)),
        yes_no(r.exact()),
        yes_no(r.connecting_is_b())
    );
    Ok(Report::checked(json, text, passed))
}

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub complex: ComplexInput,
    #[arg(long, default_value_t = 12)]
    pub max_degree: i64,
    /// Last page to print.
    #[arg(long, default_value_t = 3)]
    pub pages: i64,
}

pub fn run_spectral(a: &SpectralArgs) -> CliResult<Report> {
    let c = a.complex.load()?;
    if !c.ring().is_field() {
        return Err(CliError::Usage("spectral sequences need a field; pass --ring Q or --ring Fp".into()));
    }
    if a.pages < 1 {
        return Err(CliError::Usage("--pages must be at least 1".into()));
    }
    let lo = lowest_degree(&c);
    let fc = FilteredComplex::u_filtration(&equivariant(&c, a.max_degree)?)?;
    let pages = compute_pages(&fc, a.pages, (lo, a.max_degree))?;
    let e2 = check_e2_gysin(&c, a.max_degree)?;
    let conv = check_convergence(&c, a.max_degree)?;
    let mut text = Vec::new();
    let mut pages_json = Vec::new();
    for page in &pages {
        let cells: Vec<(i64, i64, usize)> =
            page.dims.iter().filter(|(_, &d)| d > 0).map(|(&(p, q), &d)| (p, q, d)).collect();
        let rows: Vec<Vec<String>> = cells.iter().map(|(p, q, d)| vec![p.to_string(), q.to_string(), d.to_string()]).collect();
        text.push(format!("E^{}\n{}", page.r, table(&["p", "q", "dim"], &rows)));
        pages_json.push(json!({
            "r": page.r,
            "cells": cells.iter().map(|(p, q, d)| json!({"p": p, "q": q, "dim": d})).collect::<Vec<_>>(),
        }));
    }
    text.push(format!("E^2 matches H(C) on even columns: {}", yes_no(e2.holds)));
    text.push(format!("E^inf totals match H^{{S1}}: {}", yes_no(conv.holds)));
    let json = json!({ "ring": c.ring().to_string(), "pages": pages_json, "e2": e2, "convergence": conv });
    Ok(Report::checked(json, text.join("\n\n"), e2.holds && conv.holds))
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub input: Option<PathBuf>,
}

pub fn run_verify(a: &VerifyArgs) -> CliResult<Report> {
    let text = read_input(a.input.as_deref())?;
    let c = parse_complex(&text)?.to_unchecked()?;
    let r = c.verify_relations()?;
    let rows: Vec<Vec<String>> =
        r.checks.iter().map(|k| vec![k.k.to_string(), yes_no(k.holds), k.defect_entries.to_string()]).collect();
    let mut out = table(&["k", "holds", "defect entries"], &rows);
    match r.first_failure() {
        Some(k) => out.push_str(&format!("\nrelation fails at k = {k}")),
        None => out.push_str("\nall relations hold"),
    }
    let json = json!({ "holds": r.holds(), "first_failure": r.first_failure(), "report": r });
    Ok(Report::checked(json, out, r.holds()))
}

/// `{"complex": …, "sub": [names]}` as written by `random --kind pair`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    complex: ComplexFile,
    sub: Vec<String>,
}

#[derive(Args, Debug)]
pub struct QuotientArgs {
    /// A complex file, or a pair file with `complex` and `sub`.
    pub input: Option<PathBuf>,
    /// Comma-separated generator names spanning the subcomplex.
    #[arg(long, value_delimiter = ',')]
    pub sub: Option<Vec<String>>,
    #[arg(long, value_parser = parse_ring)]
    pub ring: Option<Ring>,
    #[arg(long, default_value_t = 8)]
    pub max_degree: i64,
}

pub fn run_quotient(a: &QuotientArgs) -> CliResult<Report> {
    let text = read_input(a.input.as_deref())?;
    let value: Value = serde_json::from_str(&text).map_err(|e| s1chains::Error::Parse(e.to_string()))?;
    let (file, names) = if value.get("complex").is_some() {
        let p: PairFile = serde_json::from_value(value).map_err(|e| s1chains::Error::Parse(e.to_string()))?;
        (p.complex, a.sub.clone().unwrap_or(p.sub))
    } else {
        let f = parse_complex(&text)?;
        let names = a.sub.clone().ok_or_else(|| CliError::Usage("--sub is required for a plain complex file".into()))?;
        (f, names)
    };
    let mut c = file.to_complex()?;
    if let Some(r) = a.ring {
        c = c.with_ring(r)?;
    }
    let sub = names
        .iter()
        .map(|n| c.base().index_of(n).ok_or_else(|| CliError::Usage(format!("--sub: unknown generator `{n}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    let q = quotient(&c, &sub, a.max_degree)?;
    let rows: Vec<Vec<String>> = q
        .grid
        .squares
        .iter()
        .map(|s| vec![s.name.clone(), s.degree.to_string(), if s.anti { "anti" } else { "commute" }.into(), yes_no(s.holds)])
        .collect();
    let passed = q.grid.all_hold();
    let text = format!(
        "nine-lemma grid over {}, degrees {}..{}\n{}\nall squares hold: {}",
        c.ring(),
        q.grid.window.0,
        q.grid.window.1,
        table(&["square", "degree", "kind", "holds"], &rows),
        yes_no(passed)
    );
    let json = json!({
        "sub": names,
        "quotient": ComplexFile::from_complex(&q.quotient),
        "grid": q.grid,
        "all_hold": passed,
    });
    Ok(Report::checked(json, text, passed))
}

/// A chain map between two complex files, entries named by generator.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    source: ComplexFile,
    target: ComplexFile,
    #[serde(default)]
    degree: i64,
    entries: Vec<EntryFile>,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    /// Map file with `source`, `target`, `degree` and `entries`.
    pub input: Option<PathBuf>,
}

pub fn run_cone(a: &ConeArgs) -> CliResult<Report> {
    let text = read_input(a.input.as_deref())?;
    let m: MapFile = serde_json::from_str(&text).map_err(|e| s1chains::Error::Parse(e.to_string()))?;
    let source = m.source.to_complex()?.base().clone();
    let target = m.target.to_complex()?.base().clone();
    let mut matrix = Matrix::zeros(target.len(), source.len());
    for (i, e) in m.entries.iter().enumerate() {
        let col = source
            .index_of(&e.from)
            .ok_or_else(|| s1chains::Error::Parse(format!("entries[{i}]: unknown source generator `{}`", e.from)))?;
        let row = target
            .index_of(&e.to)
            .ok_or_else(|| s1chains::Error::Parse(format!("entries[{i}]: unknown target generator `{}`", e.to)))?;
        let c = e.coeff.parse().map_err(|err| s1chains::Error::Parse(format!("entries[{i}]: {err}")))?;
        matrix.add_to(row, col, &c);
    }
    let f = ChainMap::new(source, target, m.degree, matrix)?;
    let (c, ses) = cone(&f)?;
    let window = c.degree_range().map(|(lo, hi)| (lo - 1, hi + 1));
    let h = homology(&c, window)?;
    let les = les_from_ses(&ses, window)?;
    let acyclic = h.is_zero();
    let text = format!(
        "H(cone) over {}\n{}\nacyclic (f is a quasi-isomorphism): {}\nlong exact sequence exact: {}",
        h.ring,
        table(&["degree", "group"], &homology_rows(&h)),
        yes_no(acyclic),
        yes_no(les.is_exact())
    );
    let json = json!({
        "homology": homology_json(&h),
        "acyclic": acyclic,
        "les_exact": les.is_exact(),
        "les": les.nodes,
    });
    Ok(Report::checked(json, text, les.is_exact()))
}

#[derive(Subcommand, Debug)]
pub enum ModelKind {
    /// Circle of multiplicity κ.
    Ck {
        #[arg(long)]
        kappa: i64,
        #[arg(long, value_parser = parse_ring, default_value = "Z")]
        ring: Ring,
    },
    /// Bad circle.
    Cbad {
        #[arg(long, value_parser = parse_ring, default_value = "Z")]
        ring: Ring,
    },
    /// SC⁺ built from an orbit spectrum.
    Sc {
        input: Option<PathBuf>,
        #[arg(long, value_parser = parse_ring, default_value = "Q")]
        ring: Ring,
    },
}

/// Writes a complex file whatever the output mode, so it can be piped.
pub fn run_model(kind: &ModelKind) -> CliResult<Value> {
    let c = match kind {
        ModelKind::Ck { kappa, ring } => model_ck(*kappa, *ring)?,
        ModelKind::Cbad { ring } => model_cbad(*ring)?,
        ModelKind::Sc { input, ring } => sc_from_spectrum(&load_spectrum(input.as_deref())?, *ring)?.plus.complex,
    };
    Ok(serde_json::to_value(ComplexFile::from_complex(&c)).expect("complex files serialize"))
}

#[derive(Args, Debug)]
pub struct SphereArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long, default_value_t = 25)]
    pub cutoff: i64,
}

pub fn run_sphere(a: &SphereArgs) -> CliResult<Report> {
    let s = sphere_spectrum(a.n, a.cutoff)?;
    let m = sc_from_spectrum(&s, Ring::Rationals)?;
    let lo = 0.min(a.n);
    let inv = homology(&m.inv.complex, Some((lo, a.cutoff)))?;
    let eq = equivariant(&m.plus.complex, a.cutoff)?.homology(lo, a.cutoff)?;
    let expected = |k: i64| usize::from(k > a.n && (k - a.n - 1) % 2 == 0);
    let mut passed = true;
    let mut rows = Vec::new();
    let mut ranks = serde_json::Map::new();
    for k in lo..=a.cutoff {
        let (ri, re) = (inv.rank(k), eq.rank(k));
        passed &= ri == expected(k) && re == expected(k);
        if ri > 0 || re > 0 {
            ranks.insert(k.to_string(), json!(re));
            rows.push(vec![k.to_string(), ri.to_string(), re.to_string()]);
        }
    }
    let text = format!(
        "unit cotangent sphere, n = {}, degrees {lo}..{} over Q (other degrees vanish)\n{}\nmatches Q in degrees n+1+2k: {}",
        a.n,
        a.cutoff,
        table(&["degree", "SCinv", "SC+ equivariant"], &rows),
        yes_no(passed)
    );
    let json = json!({
        "n": a.n,
        "cutoff": a.cutoff,
        "ranks": ranks,
        "inv_homology": homology_json(&inv),
        "equivariant_homology": homology_json(&eq),
        "matches": passed,
    });
    Ok(Report::checked(json, text, passed))
}

fn graded_rows(g: &GradedGroup) -> Vec<Vec<String>> {
    g.groups.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect()
}

#[derive(Args, Debug)]
pub struct SubcriticalArgs {
    /// Half dimension of the filling; the default filling is the ball.
    #[arg(long)]
    pub n: Option<i64>,
    /// JSON `{"n": …, "groups": {"groups": {"degree": {"free_rank": …, "torsion": […]}}}}`.
    #[arg(long)]
    pub filling: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    pub cutoff: i64,
}

pub fn run_subcritical(a: &SubcriticalArgs) -> CliResult<Report> {
    let f = match (&a.filling, a.n) {
        (Some(path), _) => serde_json::from_str::<FillingHomology>(&read_file(path)?)
            .map_err(|e| s1chains::Error::Parse(format!("{}: {e}", path.display())))?,
        (None, Some(n)) => FillingHomology::ball(n),
        (None, None) => return Err(CliError::Usage("pass --n or --filling".into())),
    };
    let g = subcritical_sh(&f, a.cutoff);
    let text = format!("SH^{{S1,+}} up to degree {}\n{}", a.cutoff, table(&["degree", "group"], &graded_rows(&g)));
    Ok(Report::new(json!({ "filling": f, "cutoff": a.cutoff, "groups": g }), text))
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    /// Graded group JSON `{"groups": {"degree": {"free_rank": …, "torsion": […]}}}`.
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub cutoff: i64,
}

pub fn run_tensor(a: &TensorArgs) -> CliResult<Report> {
    let text = read_input(a.input.as_deref())?;
    let h: GradedGroup = serde_json::from_str(&text).map_err(|e| s1chains::Error::Parse(e.to_string()))?;
    let g = tensor_with_bs1(&h, a.cutoff);
    let out = format!("H tensor H(BS1) up to degree {}\n{}", a.cutoff, table(&["degree", "group"], &graded_rows(&g)));
    Ok(Report::new(json!({ "cutoff": a.cutoff, "groups": g }), out))
}

#[derive(Args, Debug)]
pub struct PiArgs {
    /// Orbit spectrum file.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub max_degree: Option<i64>,
}

pub fn run_pi(a: &PiArgs) -> CliResult<Report> {
    let s = load_spectrum(a.input.as_deref())?;
    let r = verify_pi_iso(&s, a.max_degree)?;
    let mu = mu_filtration_check(&sc_from_spectrum(&s, Ring::Rationals)?)?;
    let rows: Vec<Vec<String>> = r
        .squares
        .iter()
        .map(|q| vec![q.name.clone(), q.degree.to_string(), if q.anti { "anti" } else { "commute" }.into(), yes_no(q.holds)])
        .collect();
    let integer = match r.integer.quasi_isomorphism {
        Some(true) => "quasi-isomorphism".to_string(),
        Some(false) => format!("not a quasi-isomorphism in degrees {:?} (expected with torsion)", r.integer.failing_degrees),
        None => r.integer.note.clone(),
    };
    let text = format!(
        "Pi over Q, degrees {}..{}, epsilon = {}\nchain map: {}\nquasi-isomorphism: {}\n{}\nover Z: {integer}\nmu-filtration supported on two lines: {}, degenerates at E3: {}",
        r.window.0,
        r.window.1,
        r.epsilon,
        yes_no(r.chain_map),
        yes_no(r.quasi_isomorphism),
        table(&["square", "degree", "kind", "holds"], &rows),
        yes_no(mu.two_lines),
        yes_no(mu.degenerates_at_e3)
    );
    let passed = r.passed();
    Ok(Report::checked(json!({ "report": r, "mu_filtration": mu, "passed": passed }), text, passed))
}

#[derive(Args, Debug)]
pub struct VanishingArgs {
    #[command(flatten)]
    pub complex: ComplexInput,
    #[arg(long)]
    pub max_degree: Option<i64>,
}

pub fn run_vanishing(a: &VanishingArgs) -> CliResult<Report> {
    let c = a.complex.load()?;
    let v = vanishing_check(&c, a.max_degree)?;
    let text = table(
        &["window", "H(C) = 0", "H^S1(C) = 0", "biconditional holds"],
        &[vec![
            format!("{}..{}", v.window.0, v.window.1),
            yes_no(v.base_vanishes),
            yes_no(v.equivariant_vanishes),
            yes_no(v.holds),
        ]],
    );
    Ok(Report::checked(json!(v), text, v.holds))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RandomKind {
    Multicomplex,
    Spectrum,
    Pair,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long, value_enum, default_value = "multicomplex")]
    pub kind: RandomKind,
    /// Overridden by the S1CHAINS_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_generators: Option<usize>,
}

pub fn run_random(a: &RandomArgs) -> CliResult<Value> {
    let seed = match std::env::var("S1CHAINS_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("S1CHAINS_SEED: `{s}` is not a seed")))?,
        Err(_) => a.seed,
    };
    let mut params = RandomParams::default();
    if let Some(m) = a.max_generators {
        params.max_generators = m;
    }
    let value = match a.kind {
        RandomKind::Multicomplex => json!(ComplexFile::from_complex(&random_multicomplex(seed, &params)?)),
        RandomKind::Spectrum => json!(SpectrumFile::from_spectrum(&random_spectrum(seed, &SpectrumParams::default()))),
        RandomKind::Pair => {
            let (c, sub) = random_invariant_pair(seed, &params)?;
            let names: Vec<&str> = sub.iter().map(|&i| c.generators()[i].name.as_str()).collect();
            json!({ "complex": ComplexFile::from_complex(&c), "sub": names })
        }
    };
    Ok(value)
}
