//! Exact sum-of-squares certification: basis selection, Gram constraints,
//! numeric solve, rational rounding, `LDLᵀ` extraction and exact checks.

mod basis;
mod certificate;
mod gram;
mod refusal;
mod rounding;

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

pub use basis::{parity_obstruction, select_basis, BasisOptions, GramBasis, Hull};
pub use certificate::{extract_sos, verify_certificate, SosCertificate, SosTerm, Verification};
pub use gram::{build_gram_system, GramSystem};
pub use refusal::{exact_witness, DualWitness};
pub use rounding::round_and_project;

use crate::error::Error;
use crate::exactmath::{format_rational, ldlt, parse_rational, rational, MultiPoly, PsdVerdict};
use crate::sdp::{self, SdpOptions, SdpStatus};

/// How strict positivity of a certified target was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictnessVerdict {
    /// Some square is a nonzero constant, so `F ≥ c·f² > 0`.
    StrictConstantSquare,
    /// `F − ε` has a verified certificate.
    StrictEpsilonShift(BigRational),
    NonnegOnly,
}

impl StrictnessVerdict {
    pub fn is_strict(&self) -> bool {
        !matches!(self, StrictnessVerdict::NonnegOnly)
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.split_once(' ') {
            None if text == "strict_constant_square" => Some(StrictnessVerdict::StrictConstantSquare),
            None if text == "nonneg_only" => Some(StrictnessVerdict::NonnegOnly),
            Some(("strict_epsilon_shift", eps)) => {
                parse_rational(eps).filter(|e| e.is_positive()).map(StrictnessVerdict::StrictEpsilonShift)
            }
            _ => None,
        }
    }
}

impl fmt::Display for StrictnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrictnessVerdict::StrictConstantSquare => f.write_str("strict_constant_square"),
            StrictnessVerdict::StrictEpsilonShift(e) => write!(f, "strict_epsilon_shift {}", format_rational(e)),
            StrictnessVerdict::NonnegOnly => f.write_str("nonneg_only"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrictnessOptions {
    pub enabled: bool,
    /// Accept a constant square as proof of strictness.
    pub use_constant_square: bool,
    /// The ε ladder runs `1, 1/10, …, 10^-floor`.
    pub epsilon_floor_exponent: u32,
}

impl Default for StrictnessOptions {
    fn default() -> Self {
        StrictnessOptions { enabled: true, use_constant_square: true, epsilon_floor_exponent: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub basis: BasisOptions,
    pub sdp: SdpOptions,
    /// Solver tolerances tried in turn when rounding fails.
    pub solver_tolerances: Vec<f64>,
    /// Denominator bounds tried in turn for each solver run.
    pub denominator_bounds: Vec<u64>,
    pub max_basis: usize,
    pub time_budget: Option<Duration>,
    pub strictness: StrictnessOptions,
    /// Seed for the random points of refusal witnesses.
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            basis: BasisOptions::default(),
            sdp: SdpOptions::default(),
            solver_tolerances: vec![1e-9, 1e-11],
            denominator_bounds: vec![1_000, 1_000_000, 1_000_000_000, 1_000_000_000_000],
            max_basis: 400,
            time_budget: None,
            strictness: StrictnessOptions::default(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Error)]
pub enum CertifyError {
    /// Definitive: the target has no SOS representation.
    #[error("not a sum of squares: {reason}")]
    NotSos { reason: String, witness: Option<Box<DualWitness>> },
    /// Nothing was proved either way.
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Core(#[from] Error),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertifyStats {
    pub basis_size: usize,
    pub blocks: usize,
    pub constraints: usize,
    pub sdp_iterations: usize,
    pub margin: f64,
    pub solver_tolerance: f64,
    pub denominator_bound: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Certification {
    pub certificate: SosCertificate,
    pub strictness: StrictnessVerdict,
    pub stats: CertifyStats,
}

const TOOLCHAIN: &str = concat!("gpisos ", env!("CARGO_PKG_VERSION"), " ipm+ldl");

/// Searches for a verified rational SOS certificate of `f`.
pub fn certify(f: &MultiPoly, opts: &CertifyOptions) -> Result<Certification, CertifyError> {
    let start = Instant::now();
    let mut stats = CertifyStats::default();
    if f.is_zero() {
        let certificate = SosCertificate::new(f.ring(), f, Vec::new(), TOOLCHAIN);
        return Ok(Certification { certificate, strictness: StrictnessVerdict::NonnegOnly, stats });
    }
    if let Some(reason) = parity_obstruction(f) {
        return Err(CertifyError::NotSos { reason, witness: None });
    }
    let basis = select_basis(f, &opts.basis);
    stats.basis_size = basis.len();
    stats.blocks = basis.block_count();
    if basis.len() > opts.max_basis {
        return Err(CertifyError::Indeterminate(format!(
            "basis of {} monomials exceeds the cap of {}",
            basis.len(),
            opts.max_basis
        )));
    }
    let sys = match build_gram_system(f, &basis) {
        Ok(s) => s,
        Err(Error::BasisInsufficient(m)) if basis.complete => {
            return Err(CertifyError::NotSos {
                reason: format!("monomial {m} lies outside every square's reach"),
                witness: None,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let (problem, order) = sys.to_sdp();
    stats.constraints = problem.constraints.len();

    let mut last = String::from("no solver run");
    for &tol in &opts.solver_tolerances {
        check_budget(start, opts)?;
        let sol = match sdp::solve(&problem, &SdpOptions { tol, ..opts.sdp.clone() }) {
            Ok(s) => s,
            Err(Error::Resource(msg)) => return Err(CertifyError::Indeterminate(msg)),
            Err(e) => return Err(e.into()),
        };
        stats.sdp_iterations += sol.iterations;
        stats.margin = sol.t;
        stats.solver_tolerance = tol;
        match sol.status {
            SdpStatus::NumericalFailure => {
                last = format!("solver failed numerically at tolerance {tol:e}");
                continue;
            }
            SdpStatus::Infeasible => {
                if basis.complete {
                    if let Some(w) = exact_witness(&sys, &sol.dual, &order, f, opts.seed) {
                        if w.refutes(f) {
                            return Err(CertifyError::NotSos {
                                reason: "Gram system infeasible, exact dual witness found".into(),
                                witness: Some(Box::new(w)),
                            });
                        }
                    }
                }
                last = "Gram system looks infeasible but no exact dual witness was found".into();
                continue;
            }
            SdpStatus::Optimal | SdpStatus::NearOptimal => {}
        }

        // F − ε shares the Gram system of F except at the constant monomial,
        // so one solve serves both.
        let constant = basis.monomials.first().filter(|m| m.is_one()).map(|_| 0usize);
        if let (true, Some(c)) = (opts.strictness.enabled, constant) {
            let slack = 1e-7 * (1.0 + sol.g.amax());
            for eps in epsilon_ladder(&opts.strictness) {
                let e = rational::to_f64(&eps);
                let mut g = sol.g.clone();
                g[(c, c)] -= e;
                if e > sol.g[(c, c)] / 2.0 || min_eigenvalue(&g) < sol.t.min(0.0) - slack {
                    continue;
                }
                check_budget(start, opts)?;
                let mut shifted = sys.clone();
                let mu = basis.monomials[c].clone();
                let value = shifted.rhs_of(&mu) - &eps;
                shifted.rhs.insert(mu, value);
                for &den in &opts.denominator_bounds {
                    if let Some(mut cert) = round_and_extract(&g, &shifted, f, den)? {
                        cert.terms.push(SosTerm { coefficient: eps.clone(), poly: MultiPoly::one(f.ring()) });
                        finish(&mut cert, f)?;
                        stats.denominator_bound = den;
                        stats.elapsed = start.elapsed();
                        let strictness = StrictnessVerdict::StrictEpsilonShift(eps);
                        return Ok(Certification { certificate: cert, strictness, stats });
                    }
                }
            }
        }
        for &den in &opts.denominator_bounds {
            check_budget(start, opts)?;
            if let Some(mut cert) = round_and_extract(&sol.g, &sys, f, den)? {
                finish(&mut cert, f)?;
                stats.denominator_bound = den;
                stats.elapsed = start.elapsed();
                let strictness = if opts.strictness.enabled
                    && opts.strictness.use_constant_square
                    && cert.constant_square().is_some()
                {
                    StrictnessVerdict::StrictConstantSquare
                } else {
                    StrictnessVerdict::NonnegOnly
                };
                return Ok(Certification { certificate: cert, strictness, stats });
            }
        }
        last = format!("no rounding of the solution at tolerance {tol:e} was positive semidefinite");
    }
    Err(CertifyError::Indeterminate(format!("rational certificate not found: {last}")))
}

fn min_eigenvalue(g: &nalgebra::DMatrix<f64>) -> f64 {
    nalgebra::SymmetricEigen::new(g.clone()).eigenvalues.min()
}

fn check_budget(start: Instant, opts: &CertifyOptions) -> Result<(), CertifyError> {
    match opts.time_budget {
        Some(b) if start.elapsed() > b => {
            Err(CertifyError::Indeterminate(format!("time budget of {:.1}s exhausted", b.as_secs_f64())))
        }
        _ => Ok(()),
    }
}

fn round_and_extract(
    g: &nalgebra::DMatrix<f64>,
    sys: &GramSystem,
    f: &MultiPoly,
    den: u64,
) -> Result<Option<SosCertificate>, CertifyError> {
    let exact = round_and_project(g, sys, &BigInt::from(den))?;
    debug_assert!(sys.is_satisfied_by(&exact));
    if ldlt(&exact)?.verdict != PsdVerdict::Psd {
        return Ok(None);
    }
    Ok(Some(extract_sos(&exact, &sys.basis, f)?))
}

fn finish(cert: &mut SosCertificate, f: &MultiPoly) -> Result<(), CertifyError> {
    cert.provenance = TOOLCHAIN.into();
    cert.target_fingerprint = f.fingerprint();
    let v = verify_certificate(cert, f);
    if !v.ok {
        return Err(Error::Verification(v.diagnostic.unwrap_or_default()).into());
    }
    Ok(())
}

fn epsilon_ladder(opts: &StrictnessOptions) -> impl Iterator<Item = BigRational> {
    (0..=opts.epsilon_floor_exponent)
        .map(|k| BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize)))
}

/// Strictness of an already verified certificate of `f`: a constant square,
/// else the first `ε` of the ladder for which `F − ε` certifies.
pub fn check_strictness(cert: &SosCertificate, f: &MultiPoly, opts: &CertifyOptions) -> StrictnessVerdict {
    if opts.strictness.use_constant_square && cert.constant_square().is_some() {
        return StrictnessVerdict::StrictConstantSquare;
    }
    // ε can never exceed F(0).
    let at_origin = f.constant_term();
    let inner = CertifyOptions {
        strictness: StrictnessOptions { enabled: false, ..opts.strictness.clone() },
        ..opts.clone()
    };
    for eps in epsilon_ladder(&opts.strictness) {
        if eps > at_origin {
            continue;
        }
        let shifted = f - &MultiPoly::constant(f.ring(), eps.clone());
        if certify(&shifted, &inner).is_ok() {
            return StrictnessVerdict::StrictEpsilonShift(eps);
        }
    }
    StrictnessVerdict::NonnegOnly
}

/// Every strictness claim must be backed by the certificate itself: a
/// constant square (of value at least `ε` for an ε-shift claim).
pub fn strictness_backed(cert: &SosCertificate, verdict: &StrictnessVerdict) -> bool {
    match verdict {
        StrictnessVerdict::NonnegOnly => true,
        StrictnessVerdict::StrictConstantSquare => cert.constant_square().is_some(),
        StrictnessVerdict::StrictEpsilonShift(eps) => cert.constant_square().is_some_and(|c| &c >= eps),
    }
}

