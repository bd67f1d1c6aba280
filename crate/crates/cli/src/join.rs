use clap::{Args, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use s1chains::join_morse::{
    beta, check_gluing, f_tilde, grad_hn0_check, join_coords, join_inverse, morse_flow, rho_explicit,
    simplex_residual, strata, ConstantHamiltonian, GluingParams, SampleHamiltonian, TimeDependent,
};

use crate::output::{csv, table, yes_no, CliError, CliResult, Report};

const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `re,im;re,im;…`
fn parse_point(flag: &str, s: &str) -> CliResult<Vec<Complex64>> {
    s.split(';')
        .map(|part| {
            let nums: Vec<&str> = part.split(',').map(str::trim).collect();
            let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
            match nums.as_slice() {
                [re] => Ok(Complex64::new(num(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
                _ => Err(format!("`{part}` is not `re,im`")),
            }
        })
        .collect::<Result<_, String>>()
        .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn parse_list(flag: &str, s: &str) -> CliResult<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--{flag}: `{t}` is not a number"))))
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_samples(n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(())
}

#[derive(Subcommand, Debug)]
pub enum JoinCommand {
    /// Join coordinates of a point on the unit sphere, with the round trip.
    Coords(CoordsArgs),
    /// Samples of the gradient flow of f̃ as CSV.
    Flow(FlowArgs),
    /// Samples of the explicit simplex path as CSV.
    Rep(RepArgs),
    /// Convergence of a degenerating family of flow lines.
    Gluing(GluingArgs),
    /// Closed-form gradient of H_{N,0} against finite differences.
    Grad(GradArgs),
    /// Broken-trajectory strata of the compactified moduli space.
    Strata(StrataArgs),
}

#[derive(Args, Debug)]
pub struct CoordsArgs {
    /// Unit vector as `re,im;re,im;…`.
    #[arg(long)]
    pub z: String,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long)]
    pub z: String,
    /// Strictly increasing weights `a₀ < … < a_N`.
    #[arg(long)]
    pub a: String,
    #[arg(long, default_value_t = 3.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 13)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct RepArgs {
    /// Lengths `L₁, …, L_{N−1}`.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub lengths: String,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    pub s_max: f64,
    #[arg(long, default_value_t = 21)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct GluingArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6])]
    pub ks: Vec<i32>,
    #[arg(long, default_value_t = 5.0)]
    pub window: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Args, Debug)]
pub struct GradArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "0.4,-0.7")]
    pub x: String,
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// `sample` for cos(2πθ)x₁ + x₂², or a number for a constant.
    #[arg(long, default_value = "sample", allow_hyphen_values = true)]
    pub hamiltonian: String,
}

#[derive(Args, Debug)]
pub struct StrataArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub j: usize,
}

pub fn run(cmd: &JoinCommand) -> CliResult<Report> {
    match cmd {
        JoinCommand::Coords(a) => coords(a),
        JoinCommand::Flow(a) => flow(a),
        JoinCommand::Rep(a) => rep(a),
        JoinCommand::Gluing(a) => gluing(a),
        JoinCommand::Grad(a) => grad(a),
        JoinCommand::Strata(a) => strata_cmd(a),
    }
}

fn coords(a: &CoordsArgs) -> CliResult<Report> {
    let z = parse_point("z", &a.z)?;
    let c = join_coords(&z)?;
    let back = join_inverse(&c.t, &c.tau)?;
    let error = back.iter().zip(&z).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let rows: Vec<Vec<String>> = c
        .t
        .iter()
        .zip(&c.tau)
        .enumerate()
        .map(|(i, (t, tau))| vec![i.to_string(), format!("{t:.15}"), tau.map_or("-".into(), |v| format!("{v:.15}"))])
        .collect();
    let passed = error < IDENTITY_TOLERANCE;
    let text = format!("{}\nround-trip error: {error:.3e}", table(&["j", "t", "tau"], &rows));
    Ok(Report::checked(json!({ "coords": c, "round_trip_error": error, "passed": passed }), text, passed))
}

fn flow(a: &FlowArgs) -> CliResult<Report> {
    check_samples(a.samples)?;
    let (z0, weights) = (parse_point("z", &a.z)?, parse_list("a", &a.a)?);
    let mut rows = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let mut passed = true;
    for t in linspace(0.0, a.t_max, a.samples) {
        let z = morse_flow(&z0, &weights, t)?;
        let f = f_tilde(&z, &weights);
        let norm = z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        passed &= (norm - 1.0).abs() < IDENTITY_TOLERANCE && f >= last - IDENTITY_TOLERANCE;
        last = f;
        let mut row = vec![t, f, norm];
        row.extend(z.iter().map(|w| w.norm_sqr()));
        rows.push(row);
    }
    let mut headers = vec!["time".to_string(), "f".to_string(), "norm".to_string()];
    headers.extend((0..z0.len()).map(|j| format!("t{j}")));
    let json = json!({ "columns": headers, "samples": rows, "passed": passed });
    Ok(Report::checked(json, csv(&headers, &rows), passed))
}

fn rep(a: &RepArgs) -> CliResult<Report> {
    check_samples(a.samples)?;
    let params = GluingParams::new(Vec::new(), parse_list("lengths", &a.lengths)?)?;
    let mut rows = Vec::new();
    let mut residual: f64 = 0.0;
    for s in linspace(a.s_min, a.s_max, a.samples) {
        let t = rho_explicit(&params, beta, s);
        residual = residual.max(simplex_residual(&t));
        let mut row = vec![s];
        row.extend(t);
        rows.push(row);
    }
    let mut headers = vec!["s".to_string()];
    headers.extend((0..=params.n()).map(|j| format!("t{j}")));
    let passed = residual < IDENTITY_TOLERANCE;
    let json = json!({ "columns": headers, "samples": rows, "residual": residual, "passed": passed });
    Ok(Report::checked(json, csv(&headers, &rows), passed))
}

fn gluing(a: &GluingArgs) -> CliResult<Report> {
    let r = check_gluing(a.n, &a.ks, a.window, a.tolerance)?;
    let rows: Vec<Vec<String>> = r
        .members
        .iter()
        .map(|m| vec![m.k.to_string(), format!("{:.1e}", m.delta), format!("{:.3e}", m.distance)])
        .collect();
    let text = format!(
        "breaking chain {:?}, window ±{}\n{}\nmonotone: {}\nlast distance below {}: {}",
        r.chain,
        r.window,
        table(&["k", "delta", "distance"], &rows),
        yes_no(r.monotone),
        r.tolerance,
        yes_no(r.passed)
    );
    let passed = r.passed;
    Ok(Report::checked(json!(r), text, passed))
}

fn grad(a: &GradArgs) -> CliResult<Report> {
    let h: Box<dyn TimeDependent> = match a.hamiltonian.as_str() {
        "sample" => Box::new(SampleHamiltonian),
        other => Box::new(ConstantHamiltonian(
            other.parse().map_err(|_| CliError::Usage(format!("--hamiltonian: `{other}` is neither `sample` nor a number")))?,
        )),
    };
    let (z, x) = (parse_point("z", &a.z)?, parse_list("x", &a.x)?);
    if x.len() < 2 {
        return Err(CliError::Usage("--x needs two coordinates".into()));
    }
    let r = grad_hn0_check(h.as_ref(), &z, a.theta, &x, a.step)?;
    let text = table(
        &["max error", "tolerance", "step", "passed"],
        &[vec![format!("{:.3e}", r.max_error), format!("{:e}", r.tolerance), format!("{:e}", r.step), yes_no(r.passed)]],
    );
    let passed = r.passed;
    Ok(Report::checked(json!(r), text, passed))
}

fn strata_cmd(a: &StrataArgs) -> CliResult<Report> {
    let r = strata(a.k, a.j)?;
    let rows: Vec<Vec<String>> = r
        .strata
        .iter()
        .map(|s| {
            let chain: Vec<String> = s.chain.iter().map(ToString::to_string).collect();
            vec![chain.join(" > "), s.breaks.to_string(), s.dim.to_string(), s.codim.to_string()]
        })
        .collect();
    let text = format!(
        "M({}, {}) has dimension {}\n{}\ncodimension equals number of breaks: {}",
        r.k,
        r.j,
        r.interior_dim,
        table(&["chain", "breaks", "dim", "codim"], &rows),
        yes_no(r.consistent)
    );
    let passed = r.consistent;
    Ok(Report::checked(json!(r), text, passed))
}

