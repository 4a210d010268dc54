//! `qvolk`: tables of q-Bernoulli and fermionic q-Euler numbers, p-adic
//! integration runs and the identity-verification suites.
//!
//! Exit codes: 0 success, 1 a verified identity failed, 2 usage or
//! precondition error, 3 an integral did not converge.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;
use qvolk_core::Error;

/// Overrides the ball-representative budget of every Riemann sum.
pub const BUDGET_ENV: &str = "QVOLK_BALL_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "qvolk", version, about = "Exact and p-adic q-Volkenborn integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// beta_{n,q}, K_{n,q} or K_{n,chi,q} for a range of n.
    Numbers(commands::NumbersArgs),
    /// beta_{n,q}(x), K_{n,q}(x) or the distribution sum for K_{n,q}(x).
    Polynomials(commands::PolynomialsArgs),
    /// A p-adic integral as the limit of Riemann sums.
    Integrate(commands::IntegrateArgs),
    /// Run the identity-verification suites.
    Verify(commands::VerifyArgs),
    /// Generating-function coefficient tables.
    Series(commands::SeriesArgs),
    /// Dirichlet characters modulo f with their orders and conductors.
    Characters(commands::CharactersArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    VerificationFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::VerificationFailed => 1,
            Failure::Core(Error::NonConvergence { .. }) => 3,
            Failure::Usage(_) | Failure::Core(_) => 2,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cap = commands::budget_from_env()?;
    let (out, io, verdict) = match cli.command {
        Command::Numbers(a) => (commands::numbers(&a, cap)?, a.io, true),
        Command::Polynomials(a) => (commands::polynomials(&a, cap)?, a.io, true),
        Command::Integrate(a) => (commands::integrate(&a, cap)?, a.io, true),
        Command::Verify(a) => {
            let (out, pass) = commands::verify(&a, cap)?;
            (out, a.io, pass)
        }
        Command::Series(a) => (commands::series(&a)?, a.io, true),
        Command::Characters(a) => (commands::characters(&a)?, a.io, true),
    };
    output::write(&out, io.format, io.output.as_deref())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))?;
    if verdict {
        Ok(())
    } else {
        Err(Failure::VerificationFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::VerificationFailed => eprintln!("verification failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::VerificationFailed.exit_code(), 1);
        assert_eq!(Failure::Usage("x".into()).exit_code(), 2);
        assert_eq!(Failure::Core(Error::QIsOne).exit_code(), 2);
        assert_eq!(Failure::Core(Error::NonConvergence { trace: vec![1, 2] }).exit_code(), 3);
    }
}
