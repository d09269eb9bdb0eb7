//! Command-line front end. All I/O lives here; the computation modules stay
//! pure.

use crate::base::{box_dirichlet_spectrum, sphere_volume};
use crate::direct::{convergence_study, StudyOptions};
use crate::error::Error;
use crate::limit::homogenized_spectrum;
use crate::pencil::{pencil_spectrum, PencilParams};
use crate::regime::{
    classify, limits_from_law, phase_point, DForm, HomogenizedProblem, PhaseLabel, Rational,
    RegimeLimits, ScalingLaw,
};
use crate::report::{convergence_csv, pencil_csv, spectrum_csv, Report};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "twosheet",
    version,
    about = "Homogenized spectra of the two-sheet thin-tube Laplacian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a scaling law: limits p, q, r, D, Q, the governing limit
    /// problem, and (for N > 2 power laws) the phase-diagram label.
    Classify(ClassifyArgs),
    /// Emit the homogenized spectrum of a limit problem over a box base.
    Spectrum(SpectrumArgs),
    /// Enumerate the operator-pencil spectrum with branch tags.
    Pencil(PencilArgs),
    /// Run the direct-model convergence study (N = 2).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct LawArgs {
    /// Space dimension N.
    #[arg(long = "n")]
    dim: u32,
    /// Radius exponent alpha as an exact rational, e.g. 3/2.
    #[arg(long, value_parser = parse_rational)]
    alpha: Option<Rational>,
    /// Tube length exponent beta as an exact rational.
    #[arg(long, value_parser = parse_rational, default_value = "0")]
    beta: Rational,
    /// Radius prefactor: d^eps = d0 * eps^alpha.
    #[arg(long, default_value_t = 1.0)]
    d0: f64,
    /// Length prefactor: q^eps = q0 * eps^beta.
    #[arg(long, default_value_t = 1.0)]
    q0: f64,
    /// Exponential radius law d^eps = exp(-a/eps^2) (N = 2); replaces
    /// --alpha and --d0.
    #[arg(long, conflicts_with_all = ["alpha", "d0"])]
    exp_a: Option<f64>,
}

impl LawArgs {
    fn build(&self) -> crate::Result<ScalingLaw> {
        let d_form = match (self.exp_a, self.alpha) {
            (Some(a), _) => DForm::Exponential { a },
            (None, Some(alpha)) => DForm::PowerLaw { d0: self.d0, alpha },
            (None, None) => {
                return Err(Error::InvalidInput(
                    "either --alpha or --exp-a is required".into(),
                ))
            }
        };
        ScalingLaw::new(self.dim, d_form, self.q0, self.beta)
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeName {
    Pencil,
    Decoupled,
    Scaled,
    Coupled,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Limit problem to evaluate.
    #[arg(long, value_enum)]
    regime: RegimeName,
    /// Pencil coupling p.
    #[arg(long)]
    p: Option<f64>,
    /// Limit tube length q.
    #[arg(long)]
    q: Option<f64>,
    /// Sphere volume omega(N); defaults to the value for the base dimension.
    #[arg(long)]
    omega: Option<f64>,
    /// Scaled-Laplacian coefficient c.
    #[arg(long)]
    c: Option<f64>,
    /// Coupling constant V.
    #[arg(long)]
    v: Option<f64>,
    /// Base box side lengths, comma separated.
    #[arg(long, value_parser = parse_sides, default_value = "1,1")]
    sides: NumberList,
    /// Eigenvalues to emit, counting multiplicity.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PencilArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, value_parser = parse_sides, default_value = "1,1")]
    sides: NumberList,
    /// Base eigenvalues to source roots from.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Intervals J_1..J_n_max to enumerate.
    #[arg(long, default_value_t = 3)]
    n_max: u32,
    /// Hard-branch roots per interval.
    #[arg(long, default_value_t = 20)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Strictly decreasing eps values, comma separated.
    #[arg(long, value_parser = parse_sides, default_value = "0.25,0.125,0.0625")]
    eps: NumberList,
    /// Eigenvalues to track.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Grid refinement K (h = eps/K).
    #[arg(long, default_value_t = 4)]
    refine: u32,
    #[arg(long, value_parser = parse_sides, default_value = "1,1")]
    sides: NumberList,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Relative-error bound at the finest eps for a pass verdict.
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::from_str(s).map_err(|_| format!("expected an integer or n/d rational, got {s:?}"))
}

/// Comma-separated list of numbers as a single argument value.
#[derive(Debug, Clone)]
struct NumberList(Vec<f64>);

fn parse_sides(s: &str) -> Result<NumberList, String> {
    let values: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(NumberList(v)),
        _ => Err(format!("expected comma-separated numbers, got {s:?}")),
    }
}

#[derive(Serialize)]
struct ClassifyBody {
    #[serde(flatten)]
    problem: HomogenizedProblem,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<PhaseLabel>,
    limits: RegimeLimits,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::PoleProximity(_) | Error::ConvergenceFailure(_) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(cli: Cli) -> crate::Result<()> {
    match cli.command {
        Command::Classify(args) => {
            let law = args.law.build()?;
            let limits = limits_from_law(&law)?;
            let problem = classify(&limits, law.dim, sphere_volume(law.dim))?;
            let phase = match law.d_form {
                DForm::PowerLaw { .. } if law.dim > 2 => Some(phase_point(&law)?),
                _ => None,
            };
            let body = ClassifyBody {
                problem,
                phase,
                limits,
            };
            write_output(args.output.as_deref(), Report::new(body).to_json_bytes())
        }
        Command::Spectrum(args) => {
            let omega = args.omega.unwrap_or_else(|| sphere_volume(args.sides.0.len() as u32));
            let problem = match args.regime {
                RegimeName::Pencil => HomogenizedProblem::Pencil {
                    p: required(args.p, "--p")?,
                    q: required(args.q, "--q")?,
                    omega,
                },
                RegimeName::Decoupled => HomogenizedProblem::DecoupledThreshold {
                    q: required(args.q, "--q")?,
                },
                RegimeName::Scaled => HomogenizedProblem::ScaledLaplacian {
                    c: required(args.c, "--c")?,
                },
                RegimeName::Coupled => HomogenizedProblem::Coupled {
                    v: required(args.v, "--v")?,
                },
            };
            let base = box_dirichlet_spectrum(&args.sides.0, args.count)?;
            let spec = homogenized_spectrum(&problem, &base, args.count)?;
            let bytes = match args.format {
                Format::Json => Report::new(spec).to_json_bytes(),
                Format::Csv => spectrum_csv(&spec).into_bytes(),
            };
            write_output(args.output.as_deref(), bytes)
        }
        Command::Pencil(args) => {
            let omega = args.omega.unwrap_or_else(|| sphere_volume(args.sides.0.len() as u32));
            let params = PencilParams::new(args.p, args.q, omega);
            let base = box_dirichlet_spectrum(&args.sides.0, args.count)?;
            let spec = pencil_spectrum(&base, &params, args.n_max, args.cap)?;
            let bytes = match args.format {
                Format::Json => Report::new(spec).to_json_bytes(),
                Format::Csv => pencil_csv(&spec).into_bytes(),
            };
            write_output(args.output.as_deref(), bytes)
        }
        Command::Verify(args) => {
            let law = args.law.build()?;
            if args.sides.0.len() != 2 {
                return Err(Error::InvalidInput(
                    "--sides must list exactly two lengths for the direct model".into(),
                ));
            }
            let options = StudyOptions {
                refine: args.refine,
                sides: [args.sides.0[0], args.sides.0[1]],
                tol: args.tol,
                pass_threshold: args.threshold,
            };
            let report = convergence_study(&law, &args.eps.0, args.m, &options)?;
            let bytes = match args.format {
                Format::Json => Report::new(report).to_json_bytes(),
                Format::Csv => convergence_csv(&report).into_bytes(),
            };
            write_output(args.output.as_deref(), bytes)
        }
    }
}

fn required(value: Option<f64>, flag: &str) -> crate::Result<f64> {
    value.ok_or_else(|| Error::InvalidInput(format!("{flag} is required for this regime")))
}

fn write_output(path: Option<&std::path::Path>, bytes: Vec<u8>) -> crate::Result<()> {
    let result = match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)
        }
    };
    result.map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}
