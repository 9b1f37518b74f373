use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gpisos::moments::oracle::{run_oracle, OracleConfig, OracleOutcome};
use serde_json::json;

use crate::Outcome;

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 6)]
    pub max_sum: u32,
    /// Largest number of Wick pairings enumerated before a case is skipped.
    #[arg(long)]
    pub pairing_budget: Option<u32>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(args: &OracleArgs) -> Result<Outcome> {
    let mut config = OracleConfig { max_dim: args.max_dim, max_exponent_sum: args.max_sum, ..OracleConfig::default() };
    if let Some(b) = args.pairing_budget {
        config.pairing_budget = b;
    }
    let report = run_oracle(args.seed, args.count, &config)?;
    let mut text = format!("oracle seed {} count {}\n", report.seed, report.cases.len());
    let mut cases = Vec::new();
    for c in &report.cases {
        let m: Vec<String> = c.exponents.as_slice().iter().map(u32::to_string).collect();
        let (word, detail) = match &c.outcome {
            OracleOutcome::Agree => ("agree", String::new()),
            OracleOutcome::Mismatch { by_coefficient, by_wick } => {
                ("MISMATCH", format!(" coefficient={by_coefficient} wick={by_wick}"))
            }
            OracleOutcome::Skipped(reason) => ("skipped", format!(" {reason}")),
        };
        let _ = writeln!(text, "{:>4} m=({}) {word}{detail}  [{}]", c.index, m.join(","), c.construction);
        cases.push(json!({
            "index": c.index,
            "exponents": c.exponents.as_slice(),
            "construction": c.construction,
            "outcome": word.to_lowercase(),
            "detail": detail.trim(),
        }));
    }
    let _ = writeln!(
        text,
        "agreements {}  mismatches {}  skipped {}",
        report.agreements(),
        report.mismatches(),
        report.skipped()
    );
    crate::out(&text)?;
    if let Some(path) = &args.json {
        let doc = json!({
            "seed": report.seed,
            "agreements": report.agreements(),
            "mismatches": report.mismatches(),
            "skipped": report.skipped(),
            "cases": cases,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    if report.mismatches() > 0 {
        anyhow::bail!("{} mismatches between coefficient extraction and Wick pairings", report.mismatches());
    }
    Ok(Outcome::Ok)
}
