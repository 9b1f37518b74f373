use std::fmt::Write as _;

use gpisos::soscert::Certification;
use gpisos::CertifyError;
use serde::Serialize;

use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "certified-strict")]
    CertifiedStrict,
    #[serde(rename = "certified-nonneg")]
    CertifiedNonneg,
    #[serde(rename = "refused-not-SOS")]
    Refused,
    #[serde(rename = "indeterminate")]
    Indeterminate,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::CertifiedStrict => "certified-strict",
            Status::CertifiedNonneg => "certified-nonneg",
            Status::Refused => "refused-not-SOS",
            Status::Indeterminate => "indeterminate",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Status::CertifiedStrict | Status::CertifiedNonneg)
    }

    pub fn outcome(&self) -> Outcome {
        match self {
            Status::CertifiedStrict | Status::CertifiedNonneg => Outcome::Ok,
            Status::Refused => Outcome::Refused,
            Status::Indeterminate => Outcome::Indeterminate,
        }
    }
}

/// Result of one certification attempt, without timings.
#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub status: Status,
    pub strictness: Option<String>,
    pub basis_size: Option<usize>,
    pub squares: Option<usize>,
    pub denominator_bound: Option<u64>,
    pub reason: Option<String>,
    /// Whether a refusal carries an exactly checked dual witness.
    pub witness: bool,
}

impl Attempt {
    /// Internal errors are passed through; everything else becomes a status.
    pub fn from_result(r: &Result<Certification, CertifyError>) -> Result<Attempt, gpisos::Error> {
        Ok(match r {
            Ok(c) => Attempt {
                status: if c.strictness.is_strict() { Status::CertifiedStrict } else { Status::CertifiedNonneg },
                strictness: Some(c.strictness.to_string()),
                basis_size: Some(c.stats.basis_size),
                squares: Some(c.certificate.terms.len()),
                denominator_bound: Some(c.stats.denominator_bound),
                reason: None,
                witness: false,
            },
            Err(CertifyError::NotSos { reason, witness }) => Attempt {
                status: Status::Refused,
                strictness: None,
                basis_size: witness.as_ref().map(|w| w.basis.len()),
                squares: None,
                denominator_bound: None,
                reason: Some(reason.clone()),
                witness: witness.is_some(),
            },
            Err(CertifyError::Indeterminate(reason)) => Attempt {
                status: Status::Indeterminate,
                strictness: None,
                basis_size: None,
                squares: None,
                denominator_bound: None,
                reason: Some(reason.clone()),
                witness: false,
            },
            Err(CertifyError::Core(e)) => return Err(e.clone()),
        })
    }

    pub fn summary(&self) -> String {
        let mut s = self.status.as_str().to_string();
        if let Some(v) = &self.strictness {
            if self.status == Status::CertifiedStrict {
                let _ = write!(s, " ({v})");
            }
        }
        if let Some(n) = self.squares {
            let _ = write!(s, ", {n} squares");
        }
        if let Some(b) = self.basis_size {
            let _ = write!(s, ", basis {b}");
        }
        if let Some(r) = &self.reason {
            let _ = write!(s, ": {r}");
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubproblemReport {
    pub label: String,
    pub instance: String,
    pub strict_required: bool,
    #[serde(flatten)]
    pub attempt: Attempt,
    pub certificate: Option<String>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub target: String,
    pub subproblems: Vec<SubproblemReport>,
    pub inequality_certified: bool,
    /// Every top-`k` obligation is strict.
    pub equality_characterization: bool,
    pub verdict: String,
}

impl RunReport {
    pub fn new(target: String, subproblems: Vec<SubproblemReport>) -> RunReport {
        let inequality_certified = subproblems.iter().all(|s| s.attempt.status.is_certified());
        let equality_characterization = inequality_certified
            && subproblems.iter().filter(|s| s.strict_required).all(|s| s.attempt.status == Status::CertifiedStrict);
        let verdict = if equality_characterization {
            "inequality certified, strict on every top obligation".to_string()
        } else if inequality_certified {
            "inequality certified, equality characterization not established".to_string()
        } else if subproblems.iter().any(|s| s.attempt.status == Status::Refused) {
            "not certified: refusal encountered".to_string()
        } else {
            "not certified: indeterminate obligations remain".to_string()
        };
        RunReport { target, subproblems, inequality_certified, equality_characterization, verdict }
    }

    pub fn outcome(&self) -> Outcome {
        self.subproblems.iter().fold(Outcome::Ok, |acc, s| acc.worst(s.attempt.status.outcome()))
    }

    pub fn text(&self) -> String {
        let mut out = format!("target {}\n", self.target);
        let width = self.subproblems.iter().map(|s| s.label.len()).max().unwrap_or(0);
        for s in &self.subproblems {
            let mark = if s.strict_required { "*" } else { " " };
            let _ = writeln!(out, "{mark} {:<width$}  {}  [{} ms]", s.label, s.attempt.summary(), s.elapsed_ms);
            if let Some(path) = &s.certificate {
                let _ = writeln!(out, "  {:<width$}  -> {path}", "");
            }
        }
        let _ = writeln!(out, "(* strictness required)");
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}
