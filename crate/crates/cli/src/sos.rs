use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use gpisos::certfmt::{emit, CertificateFile, Metadata};
use gpisos::{certify, MultiPoly, Ring};

use crate::report::{Attempt, Status};
use crate::{out, Budget, Outcome};

#[derive(Args, Debug)]
pub struct SosArgs {
    /// Polynomial, e.g. `x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1`.
    pub poly: String,
    /// Comma-separated variable names in ring order.
    #[arg(long)]
    pub vars: String,
    /// Write the certificate here if one is found.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: Budget,
}

pub fn run(args: &SosArgs) -> Result<Outcome> {
    let ring = Ring::new(args.vars.split(',').map(str::trim))?;
    let f = MultiPoly::parse(&ring, &args.poly)?;
    let result = certify(&f, &args.budget.options());
    let attempt = Attempt::from_result(&result)?;
    let mut text = format!("{}\n", attempt.summary());
    if let Ok(c) = &result {
        text.push_str(&format!("{}\n", c.certificate));
        if let Some(path) = &args.out {
            let meta = Metadata {
                strictness: Some(c.strictness.clone()),
                toolchain: c.certificate.provenance.clone(),
                ..Metadata::default()
            };
            std::fs::write(path, emit(&CertificateFile::new(&c.certificate, &f, meta)?)?)?;
        }
    }
    if let (Status::Refused, Err(gpisos::CertifyError::NotSos { witness: Some(w), .. })) = (attempt.status, &result) {
        text.push_str(&format!("dual witness: L(F) = {} with a PSD moment matrix of order {}\n", w.value, w.basis.len()));
    }
    out(&text)?;
    Ok(attempt.status.outcome())
}
