mod algebra;
mod join;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use algebra::{
    ConeArgs, EquivariantArgs, GysinArgs, HomologyArgs, ModelKind, PiArgs, QuotientArgs, RandomArgs, SpectralArgs,
    SphereArgs, SubcriticalArgs, TensorArgs, VanishingArgs, VerifyArgs,
};
use output::{CliResult, Report};

/// Exact S¹-equivariant homological algebra on multicomplexes.
#[derive(Parser, Debug)]
#[command(name = "s1chains", version)]
struct Cli {
    /// Emit a single JSON document instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of the underlying chain complex.
    Homology(HomologyArgs),
    /// Equivariant homology H^{S1}.
    Equivariant(EquivariantArgs),
    /// Gysin long exact sequence and the comparison of δ with B.
    Gysin(GysinArgs),
    /// Spectral sequence of the u-filtration.
    Spectral(SpectralArgs),
    /// Checks the multicomplex relations of a file.
    Verify(VerifyArgs),
    /// Quotient by an invariant subcomplex and the nine-lemma grid.
    Quotient(QuotientArgs),
    /// Mapping cone of a chain map.
    Cone(ConeArgs),
    /// Writes a model complex as JSON.
    Model {
        #[command(subcommand)]
        kind: ModelKind,
    },
    /// Model of the unit cotangent bundle of a sphere.
    Sphere(SphereArgs),
    /// Positive S¹-equivariant symplectic homology of a subcritical filling.
    Subcritical(SubcriticalArgs),
    /// Tensor product with H(BS¹).
    #[command(name = "tensor-bs1")]
    TensorBs1(TensorArgs),
    /// Verifies the quasi-isomorphism Π for an orbit spectrum.
    #[command(name = "pi-check")]
    PiCheck(PiArgs),
    /// Compares vanishing of H(C) with vanishing of H^{S1}(C).
    Vanishing(VanishingArgs),
    /// Join-sphere Morse numerics.
    Join {
        #[command(subcommand)]
        command: join::JoinCommand,
    },
    /// Writes a seeded random complex, spectrum or invariant pair as JSON.
    Random(RandomArgs),
}

fn dispatch(command: &Command) -> CliResult<Report> {
    match command {
        Command::Homology(a) => algebra::run_homology(a),
        Command::Equivariant(a) => algebra::run_equivariant(a),
        Command::Gysin(a) => algebra::run_gysin(a),
        Command::Spectral(a) => algebra::run_spectral(a),
        Command::Verify(a) => algebra::run_verify(a),
        Command::Quotient(a) => algebra::run_quotient(a),
        Command::Cone(a) => algebra::run_cone(a),
        Command::Model { kind } => document(algebra::run_model(kind)?),
        Command::Sphere(a) => algebra::run_sphere(a),
        Command::Subcritical(a) => algebra::run_subcritical(a),
        Command::TensorBs1(a) => algebra::run_tensor(a),
        Command::PiCheck(a) => algebra::run_pi(a),
        Command::Vanishing(a) => algebra::run_vanishing(a),
        Command::Join { command } => join::run(command),
        Command::Random(a) => document(algebra::run_random(a)?),
    }
}

/// Generators print their JSON in both modes.
fn document(value: serde_json::Value) -> CliResult<Report> {
    let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    Ok(Report::new(value, text))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
            } else {
                report.text
            };
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
