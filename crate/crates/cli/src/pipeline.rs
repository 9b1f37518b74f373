use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use gpisos::certfmt::{emit, CertificateFile};
use gpisos::gapbuild::{build_instance, enumerate_subproblems, exponent_label, parse_exponents};
use gpisos::{certify, CertifyOptions, ExponentVector, GapInstance, Subproblem, SymbolicExponent};
use rayon::prelude::*;

use crate::report::{Attempt, RunReport, SubproblemReport};
use crate::{Budget, Outcome};

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Comma-separated exponents, e.g. `2,1,1,1` or `m,3,2`.
    #[arg(long)]
    pub exponents: String,
    #[arg(long)]
    pub symbolic: bool,
    /// Directory receiving certificates and reports.
    #[arg(long, default_value = "gpisos-out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub budget: Budget,
}

/// Worker count from `GPI_WORKERS`, else rayon's default.
fn workers() -> Result<usize> {
    match std::env::var("GPI_WORKERS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("GPI_WORKERS={v:?} is not a count"))?;
            if n == 0 {
                bail!("GPI_WORKERS must be positive");
            }
            Ok(n)
        }
        Err(_) => Ok(0),
    }
}

/// Flattens the reduction down to two coordinates.
pub fn obligations(m: &ExponentVector, sym: Option<SymbolicExponent>) -> Result<Vec<(GapInstance, bool)>> {
    let mut out = Vec::new();
    let mut pending = vec![m.clone()];
    while let Some(m) = pending.pop() {
        for s in enumerate_subproblems(&m, sym)? {
            match s {
                Subproblem::Instance { instance, strict_required } => out.push((instance, strict_required)),
                Subproblem::Recursive(lower) => pending.push(lower),
            }
        }
    }
    Ok(out)
}

fn certify_one(
    instance: &GapInstance,
    strict_required: bool,
    opts: &CertifyOptions,
    out: &Path,
    log: &Mutex<fs::File>,
) -> Result<SubproblemReport> {
    let start = Instant::now();
    let gap = build_instance(instance)?;
    let result = certify(&gap.poly, opts);
    let attempt = Attempt::from_result(&result)?;
    let mut certificate = None;
    if let Ok(c) = &result {
        let file = CertificateFile::for_gap(&c.certificate, &gap, Some(c.strictness.clone()))?;
        let path = out.join(format!("{}.gpicert", instance.slug()));
        fs::write(&path, emit(&file)?).with_context(|| format!("writing {}", path.display()))?;
        certificate = Some(path.display().to_string());
    }
    let report = SubproblemReport {
        label: instance.label(),
        instance: instance.descriptor(),
        strict_required,
        attempt,
        certificate,
        elapsed_ms: start.elapsed().as_millis(),
    };
    // Progress survives an interrupted run.
    let mut f = log.lock().expect("log lock");
    writeln!(f, "{}\t{}", report.label, report.attempt.summary())?;
    Ok(report)
}

pub fn run(args: &CertifyArgs) -> Result<Outcome> {
    let (m, sym) = parse_exponents(&args.exponents)?;
    if sym.is_some() != args.symbolic {
        bail!("--symbolic must be given exactly when the exponents contain m");
    }
    let opts = args.budget.options();
    let todo = obligations(&m, sym)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let log = Mutex::new(
        OpenOptions::new().create(true).write(true).truncate(true).open(args.out.join("progress.log"))?,
    );
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers()?).build()?;
    let results: Vec<Result<SubproblemReport>> = pool.install(|| {
        todo.par_iter().map(|(inst, strict)| certify_one(inst, *strict, &opts, &args.out, &log)).collect()
    });
    let subproblems = results.into_iter().collect::<Result<Vec<_>>>()?;
    let report = RunReport::new(format!("F_{{{}}}", exponent_label(&m, sym.as_ref())), subproblems);
    let text = report.text();
    fs::write(args.out.join("report.txt"), &text)?;
    fs::write(args.out.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    crate::out(&text)?;
    Ok(report.outcome())
}
