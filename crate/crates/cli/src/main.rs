use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polarphi_core::{Error, Tolerances};

mod commands;
mod grid;
mod output;

use output::Format;

/// Exact, quadrature and Monte Carlo evaluation of the polar moment
/// functional phi(K), with verification suites.
#[derive(Debug, Parser)]
#[command(name = "polarphi", version)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(flatten)]
    pub tol: TolArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Closed-form agreement and maximality slack [default: 1e-12].
    #[arg(long, global = true)]
    pub tol_exact: Option<f64>,
    /// Agreement between the two p-ball recursions [default: 1e-10].
    #[arg(long, global = true)]
    pub tol_cross_path: Option<f64>,
    /// Inequality slack and isotropic-identity residual [default: 1e-10].
    #[arg(long, global = true)]
    pub tol_identity: Option<f64>,
    /// Relative finite-difference residual [default: 1e-5].
    #[arg(long, global = true)]
    pub tol_fd: Option<f64>,
    /// Absolute tolerance of profile quadrature [default: 1e-11].
    #[arg(long, global = true)]
    pub tol_quadrature: Option<f64>,
    /// Rounding level for strict comparisons [default: 1e-12].
    #[arg(long, global = true)]
    pub tol_strict: Option<f64>,
}

impl TolArgs {
    pub fn resolve(&self) -> Result<Tolerances, Error> {
        let mut t = Tolerances::default();
        let overrides = [
            (self.tol_exact, &mut t.exact, "tol-exact"),
            (self.tol_cross_path, &mut t.cross_path, "tol-cross-path"),
            (self.tol_identity, &mut t.identity, "tol-identity"),
            (self.tol_fd, &mut t.finite_difference, "tol-fd"),
            (self.tol_quadrature, &mut t.quadrature, "tol-quadrature"),
            (self.tol_strict, &mut t.strict_rounding, "tol-strict"),
        ];
        for (value, slot, name) in overrides {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Domain(format!(
                        "--{name} must be a positive number, got {v}"
                    )));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate phi for a p-ball or a described body.
    #[command(subcommand)]
    Phi(PhiCommand),
    /// Evaluate the product factor f(y1, y2, p).
    FEval {
        #[arg(long)]
        y1: f64,
        #[arg(long)]
        y2: f64,
        #[arg(long)]
        p: String,
    },
    /// Tabulate phi(B_p^n) over a p grid and locate the maximum.
    Scan {
        #[arg(long)]
        dim: usize,
        /// `default`, `geom:LO:HI:COUNT` or a comma list such as `1,1.5,inf`;
        /// 1, 2 and inf are always included.
        #[arg(long, default_value = "default")]
        grid: String,
    },
    /// Run a verification suite; exits 1 on any violation.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Decompose phi for a body of revolution.
    Revolution {
        /// `ball`, `cylinder`, `cone`, `pball:P`, a grid document, or a file.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        dim: usize,
        /// Assert the summand bound, the Hensley window and the volume product.
        #[arg(long)]
        diagnostics: bool,
    },
    /// List the registered phi evaluators.
    Methods,
}

#[derive(Debug, Subcommand)]
pub enum PhiCommand {
    /// Closed form for B_p^n.
    Exact {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "f")]
        method: String,
    },
    /// Monte Carlo estimate for a described body.
    Mc {
        /// Body description: a file, `-` for stdin, or inline JSON.
        #[arg(long)]
        body: String,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        /// Decimal or 0x-prefixed hexadecimal.
        #[arg(long, default_value = "0")]
        seed: String,
    },
    /// Any registered method on a described body.
    Eval {
        #[arg(long)]
        body: String,
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value = "0")]
        seed: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// phi(B_p^n) is maximal at p = 2 and equals n/(n+2)^2 there.
    Theorem {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5, 10, 20])]
        dims: Vec<usize>,
        #[arg(long, default_value = "default")]
        grid: String,
    },
    /// Monotonicity, symmetry and convexity checks of the reduction.
    Harness,
    /// Volume product, lower-bound chain and isotropic identity on p-balls.
    Inequalities {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5, 10, 20])]
        dims: Vec<usize>,
        #[arg(long, default_value = "default")]
        grid: String,
    },
}

/// Exit status for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) | Error::ConjectureViolation { .. } => 1,
        Error::NonConvergence { .. } | Error::EnvelopeFailure { .. } => 3,
        _ => 2,
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Order(_) => "order",
        Error::Parse { .. } => "parse",
        Error::Body(_) => "body",
        Error::DimensionMismatch { .. } => "dimension",
        Error::NonInvertible { .. } => "non-invertible",
        Error::Profile(_) => "profile",
        Error::EnvelopeFailure { .. } => "envelope",
        Error::NonConvergence { .. } => "non-convergence",
        Error::Invariant(_) => "invariant",
        Error::ConjectureViolation { .. } => "conjecture",
        Error::Unsupported(_) => "unsupported",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(outcome.text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            if let Some(reason) = &outcome.failure {
                eprintln!("error[verification]: {reason}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error[{}]: {message}", kind(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
