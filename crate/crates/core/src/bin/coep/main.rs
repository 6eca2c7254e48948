//! `coep`: Moore-Penrose inverses, co-EP classification, theorem audits and
//! perturbation sweeps from the command line.
//!
//! Exit codes: 0 success, 2 valid run with a negative mathematical outcome,
//! 64 usage or parse error, 70 internal numerical failure.

mod audit;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coep::linalg::{NormSpec, ToleranceConfig};
use coep::population::{DimRange, InstanceClass};
use coep::CoepError;
use num_complex::Complex64;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "coep", version, about = "Moore-Penrose inverses and co-EP elements of complex matrix algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Norm of the algebra: l1, l2, linf or lp:<p>.
    #[arg(long, global = true, default_value = "l2", value_parser = parse_norm)]
    pub norm: NormSpec,
    /// Master seed for generated instances and perturbations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of generated instances.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Dimension range a..b of generated instances, within 1..16.
    #[arg(long, global = true, default_value = "2..6", value_parser = parse_dims)]
    pub dims: DimRange,
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
    #[arg(long, global = true)]
    pub tol_invert: Option<f64>,
    #[arg(long, global = true)]
    pub tol_angle: Option<f64>,
    #[arg(long, global = true)]
    pub tol_hermitian: Option<f64>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn tolerances(&self) -> Result<ToleranceConfig, CoepError> {
        let mut cfg = ToleranceConfig::default();
        let overrides = [
            (&mut cfg.rank, self.tol_rank),
            (&mut cfg.residual, self.tol_residual),
            (&mut cfg.invertibility, self.tol_invert),
            (&mut cfg.angle, self.tol_angle),
            (&mut cfg.hermitian, self.tol_hermitian),
        ];
        for (field, value) in overrides {
            if let Some(v) = value {
                *field = v;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moore-Penrose inverse (l2) or certificate / search under other norms.
    Mp {
        input: PathBuf,
        /// Candidate inverse to certify instead of computing one.
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// EP / co-EP / bi-EP / hermitian co-EP classification.
    Classify { input: PathBuf },
    /// Runs one theorem auditor over a generated population.
    Audit {
        #[arg(value_enum)]
        suite: Suite,
        /// Random (λ, μ) pairs per instance for the suites that take them.
        #[arg(long, default_value_t = 5)]
        pairs: usize,
        /// Fixed λ, e.g. 2 or -3i or 1+2i; requires --mu.
        #[arg(long, requires = "mu", allow_hyphen_values = true, value_parser = parse_scalar)]
        lambda: Option<Complex64>,
        #[arg(long, requires = "lambda", allow_hyphen_values = true, value_parser = parse_scalar)]
        mu: Option<Complex64>,
        /// Restrict the population to one class.
        #[arg(long, value_parser = parse_class)]
        class: Option<InstanceClass>,
    },
    /// Condition-(P) perturbation sweep around the input matrix.
    Perturb {
        input: PathBuf,
        /// Contraction targets, each in [0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.4,0.49")]
        eps: Vec<f64>,
    },
    /// Generates instances as JSON matrices.
    Gen {
        #[arg(long, value_parser = parse_class)]
        class: Option<InstanceClass>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Thm7,
    Thm5,
    Cor8,
    Cor9,
    Pro37,
    Pro38,
    Thm39,
    Prop8,
    Rem10,
    Rem34,
}

fn parse_norm(s: &str) -> Result<NormSpec, String> {
    s.parse().map_err(|e: CoepError| e.to_string())
}

fn parse_dims(s: &str) -> Result<DimRange, String> {
    s.parse().map_err(|e: CoepError| e.to_string())
}

fn parse_class(s: &str) -> Result<InstanceClass, String> {
    s.parse().map_err(|e: CoepError| e.to_string())
}

fn parse_scalar(s: &str) -> Result<Complex64, String> {
    s.replace(' ', "").parse::<Complex64>().map_err(|_| format!("bad complex scalar {s:?}"))
}

pub fn exit_code(e: &CoepError) -> u8 {
    match e {
        CoepError::Parse(_)
        | CoepError::InvalidInput(_)
        | CoepError::Shape(_)
        | CoepError::Io(_)
        | CoepError::Unsupported(_) => EXIT_USAGE,
        CoepError::NotMpInvertible(_) | CoepError::Precondition(_) => EXIT_NEGATIVE,
        CoepError::Singular { .. } | CoepError::Contract { .. } => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| commands::run(&cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("coep: error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
