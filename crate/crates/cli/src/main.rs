//! `gpisos`: build gap polynomials, certify inequality chains, verify
//! certificate files.

mod build;
mod conjecture;
mod oracle;
mod pipeline;
mod report;
mod sos;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use gpisos::CertifyOptions;

/// Exit statuses shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    Indeterminate = 3,
    Refused = 2,
}

impl Outcome {
    /// Refusal outranks indeterminate.
    pub fn worst(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Refused, _) | (_, Outcome::Refused) => Outcome::Refused,
            (Outcome::Indeterminate, _) | (_, Outcome::Indeterminate) => Outcome::Indeterminate,
            _ => Outcome::Ok,
        }
    }
}

#[derive(Parser)]
#[command(name = "gpisos", version, about = "Exact SOS certificates for Gaussian product inequality gaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a gap polynomial.
    Build(build::BuildArgs),
    /// Certify every reduction obligation of an exponent vector.
    Certify(pipeline::CertifyArgs),
    /// Check certificate files exactly.
    Verify(verify::VerifyArgs),
    /// Cross-check moment extraction against Wick pairings.
    Oracle(oracle::OracleArgs),
    /// Certify an arbitrary polynomial.
    Sos(sos::SosArgs),
    /// Build the lower-triangular polynomial H and try to certify it.
    Conjecture(conjecture::ConjectureArgs),
}

/// Resource limits for one certification.
#[derive(Args, Clone, Debug)]
pub struct Budget {
    /// Wall-clock seconds per subproblem.
    #[arg(long, default_value_t = 600)]
    pub time_budget: u64,
    /// Largest denominator tried when rounding.
    #[arg(long, default_value_t = 1_000_000_000_000)]
    pub max_denominator: u64,
    /// Refuse to set up bases larger than this.
    #[arg(long, default_value_t = 400)]
    pub max_basis: usize,
    /// Seed for the randomized parts of the refusal check.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

impl Budget {
    pub fn options(&self) -> CertifyOptions {
        let base = CertifyOptions::default();
        let mut bounds: Vec<u64> =
            base.denominator_bounds.iter().copied().filter(|&d| d <= self.max_denominator).collect();
        if bounds.last() != Some(&self.max_denominator) {
            bounds.push(self.max_denominator);
        }
        CertifyOptions {
            denominator_bounds: bounds,
            max_basis: self.max_basis,
            time_budget: Some(Duration::from_secs(self.time_budget)),
            seed: self.seed,
            ..base
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn out(text: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

/// Default location of the transcribed published certificates.
pub fn default_fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Build(a) => build::run(&a),
        Command::Certify(a) => pipeline::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Oracle(a) => oracle::run(&a),
        Command::Conjecture(a) => conjecture::run(&a),
        Command::Sos(a) => sos::run(&a),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
