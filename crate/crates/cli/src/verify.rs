use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use gpisos::certfmt::{parse, CertificateFile, EXTENSION};
use gpisos::gapbuild::build_instance;
use gpisos::GapInstance;

use crate::{conjecture, default_fixture_dir, out, Outcome};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Certificate files or directories of them.
    pub paths: Vec<PathBuf>,
    /// Verify the transcribed published certificates.
    #[arg(long)]
    pub paper_fixtures: bool,
    /// Location of the published certificates.
    #[arg(long)]
    pub fixtures_dir: Option<PathBuf>,
}

fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            inner.retain(|q| q.extension().is_some_and(|x| x == EXTENSION));
            inner.sort();
            out.extend(inner);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Rebuilds the target named in the metadata, if any, on the file's ring.
fn rebuilt_target(file: &CertificateFile) -> Result<Option<gpisos::MultiPoly>> {
    if let Some(desc) = &file.meta.instance {
        let gap = build_instance(&GapInstance::from_descriptor(desc)?)?;
        if file.meta.normalization.is_some_and(|n| n != gap.normalization) {
            bail!("normalization {} does not match the rebuilt {}", file.meta.normalization.unwrap(), gap.normalization);
        }
        return Ok(Some(gap.poly.embed(&file.ring)?));
    }
    if let Some(desc) = file.meta.extra.get(conjecture::META_KEY) {
        return Ok(Some(conjecture::rebuild(desc)?.embed(&file.ring)?));
    }
    Ok(None)
}

/// `Ok(())` when the file is sound, otherwise the first problem found.
fn check(path: &Path) -> Result<std::result::Result<String, String>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let file = match parse(&bytes) {
        Ok(f) => f,
        Err(e) => return Ok(Err(format!("parse error: {e}"))),
    };
    let rebuilt = match rebuilt_target(&file) {
        Ok(t) => t,
        Err(e) => return Ok(Err(format!("cannot rebuild target: {e:#}"))),
    };
    if let Some(t) = &rebuilt {
        if *t != file.target {
            return Ok(Err("target differs from the rebuilt gap polynomial".into()));
        }
    }
    let audit = file.audit();
    if !audit.identity {
        return Ok(Err(audit.diagnostic.unwrap_or_else(|| "identity fails".into())));
    }
    if !audit.strictness_backed {
        return Ok(Err(format!("strictness claim {} is not backed", file.meta.strictness.unwrap())));
    }
    let mut note = format!("{} squares", file.squares.len());
    if let Some(s) = &file.meta.strictness {
        note.push_str(&format!(", {s}"));
    }
    if rebuilt.is_none() {
        note.push_str(", target not rebuilt");
    }
    Ok(Ok(note))
}

fn known_defect(path: &Path) -> Option<String> {
    let file = parse(&fs::read(path).ok()?).ok()?;
    file.meta.extra.get("known_defect").cloned()
}

pub fn run(args: &VerifyArgs) -> Result<Outcome> {
    let mut inputs = args.paths.clone();
    if args.paper_fixtures {
        inputs.push(args.fixtures_dir.clone().unwrap_or_else(default_fixture_dir));
    }
    if inputs.is_empty() {
        bail!("nothing to verify: give paths or --paper-fixtures");
    }
    let files = collect(&inputs)?;
    if files.is_empty() {
        bail!("no .{EXTENSION} files found");
    }
    let mut outcome = Outcome::Ok;
    for path in &files {
        match check(path)? {
            Ok(note) => out(&format!("PASS  {}  ({note})\n", path.display()))?,
            Err(reason) => match known_defect(path) {
                Some(defect) if args.paper_fixtures => {
                    out(&format!("XFAIL {}  {reason} (known defect: {defect})\n", path.display()))?
                }
                _ => {
                    out(&format!("FAIL  {}  {reason}\n", path.display()))?;
                    outcome = Outcome::Refused;
                }
            },
        }
    }
    Ok(outcome)
}
