use std::fmt::Write as _;

use anyhow::{bail, Result};
use clap::Args;
use gpisos::exactmath::format_rational;
use gpisos::gapbuild::{build_instance, enumerate_cases, parse_exponents};
use gpisos::GapInstance;

use crate::{out, Outcome};

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Comma-separated exponents, e.g. `4,3,2` or `m,1,1,1`.
    #[arg(long)]
    pub exponents: String,
    /// 1-based case number; all cases when omitted.
    #[arg(long)]
    pub case: Option<usize>,
    /// Treat the `m` slot symbolically.
    #[arg(long)]
    pub symbolic: bool,
    /// One term per line instead of a single expression.
    #[arg(long)]
    pub terms: bool,
}

/// Instances named by `--exponents`/`--case`/`--symbolic`.
pub fn instances(exponents: &str, case: Option<usize>, symbolic: bool) -> Result<Vec<GapInstance>> {
    let (m, sym) = parse_exponents(exponents)?;
    if sym.is_some() != symbolic {
        bail!("--symbolic must be given exactly when the exponents contain m");
    }
    let cases = enumerate_cases(m.len())?;
    let chosen: Vec<usize> = match case {
        Some(c) if c == 0 || c > cases.len() => bail!("case {c} out of range 1..={}", cases.len()),
        Some(c) => vec![c],
        None => (1..=cases.len()).collect(),
    };
    Ok(chosen
        .into_iter()
        .map(|c| {
            let mut inst = GapInstance::new(m.clone(), cases[c - 1].clone());
            inst.case_id = Some(c);
            inst.symbolic = sym;
            inst
        })
        .collect())
}

pub fn run(args: &BuildArgs) -> Result<Outcome> {
    let mut text = String::new();
    for inst in instances(&args.exponents, args.case, args.symbolic)? {
        let gap = build_instance(&inst)?;
        let _ = writeln!(text, "{}  normalization {}", inst.label(), gap.normalization);
        let _ = writeln!(text, "  {}", inst.construction.describe());
        let _ = writeln!(text, "  ring {}", gap.poly.ring().names().join(","));
        if args.terms {
            for (mono, c) in gap.poly.terms().rev() {
                let _ = writeln!(text, "  {} {}", format_rational(c), mono.display_with(gap.poly.ring().names()));
            }
        } else {
            let _ = writeln!(text, "  {}", gap.poly);
        }
    }
    out(&text)?;
    Ok(Outcome::Ok)
}
