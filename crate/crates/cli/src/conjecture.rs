use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use gpisos::certfmt::{emit, CertificateFile, Metadata};
use gpisos::exactmath::rat;
use gpisos::gapbuild::{build_conjecture_h, parse_exponents};
use gpisos::{certify, MultiPoly};
use serde::Serialize;

use crate::report::{Attempt, Status};
use crate::{Budget, Outcome};

/// Metadata key recording which H a certificate is for.
pub const META_KEY: &str = "conjecture";

#[derive(Args, Debug)]
pub struct ConjectureArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated exponents, one per coordinate.
    #[arg(long)]
    pub m: String,
    /// Write the certificate (if found) and a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: Budget,
}

#[derive(Serialize)]
struct ConjectureReport {
    n: usize,
    exponents: String,
    terms: usize,
    degree: Option<u32>,
    vanishes_at_origin: bool,
    #[serde(flatten)]
    attempt: Attempt,
    certificate: Option<String>,
    elapsed_ms: u128,
}

fn descriptor(n: usize, m: &str) -> String {
    format!("n={n} exponents={m}")
}

/// Inverse of the descriptor stored under [`META_KEY`].
pub fn rebuild(desc: &str) -> Result<MultiPoly> {
    let mut n = None;
    let mut m = None;
    for field in desc.split_whitespace() {
        match field.split_once('=') {
            Some(("n", v)) => n = Some(v.parse::<usize>().with_context(|| format!("bad n {v:?}"))?),
            Some(("exponents", v)) => m = Some(v.to_string()),
            _ => bail!("unknown conjecture field {field:?}"),
        }
    }
    let (Some(n), Some(m)) = (n, m) else { bail!("conjecture descriptor needs n and exponents") };
    build(n, &m)
}

fn build(n: usize, m: &str) -> Result<MultiPoly> {
    let (exps, sym) = parse_exponents(m)?;
    if sym.is_some() {
        bail!("H is built for concrete exponents only");
    }
    Ok(build_conjecture_h(n, &exps)?)
}

pub fn run(args: &ConjectureArgs) -> Result<Outcome> {
    let start = Instant::now();
    let h = build(args.n, &args.m)?;
    let origin = vec![rat(0, 1); h.ring().len()];
    let vanishes = h.evaluate(&origin)? == rat(0, 1);
    println!("H for n={} m=({})", args.n, args.m);
    println!("  ring {}", h.ring().names().join(","));
    println!("  {} terms, degree {}", h.len(), h.total_degree().map_or("-".into(), |d| d.to_string()));
    println!("  H(0) = 0: {}", if vanishes { "yes" } else { "NO" });
    let result = certify(&h, &args.budget.options());
    let attempt = Attempt::from_result(&result)?;
    println!("  certification: {}", attempt.summary());
    if attempt.status == Status::Refused {
        println!("  !!! H was refused as not SOS: this is evidence against the conjecture !!!");
    }
    let mut certificate = None;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        let stem = format!("H_n{}_{}", args.n, args.m.replace(',', "-"));
        if let Ok(c) = &result {
            let mut extra = BTreeMap::new();
            extra.insert(META_KEY.to_string(), descriptor(args.n, &args.m));
            let meta = Metadata {
                strictness: Some(c.strictness.clone()),
                toolchain: c.certificate.provenance.clone(),
                extra,
                ..Metadata::default()
            };
            let path = dir.join(format!("{stem}.gpicert"));
            std::fs::write(&path, emit(&CertificateFile::new(&c.certificate, &h, meta)?)?)?;
            println!("  -> {}", path.display());
            certificate = Some(path.display().to_string());
        }
        let report = ConjectureReport {
            n: args.n,
            exponents: args.m.clone(),
            terms: h.len(),
            degree: h.total_degree(),
            vanishes_at_origin: vanishes,
            attempt: attempt.clone(),
            certificate,
            elapsed_ms: start.elapsed().as_millis(),
        };
        std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&report)? + "\n")?;
    }
    if !vanishes {
        bail!("H(0) is not zero");
    }
    Ok(attempt.status.outcome())
}
