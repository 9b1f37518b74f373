//! Seeded cross-check of [`moment_by_coefficient`] against [`moment_by_wick`]
//! on random constructions.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{moment_by_coefficient, moment_by_wick, Cell, Construction, ExponentVector};
use crate::error::{Error, Result};

/// Sampling limits for [`run_oracle`].
#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub max_dim: usize,
    pub max_exponent_sum: u32,
    pub pairing_budget: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_dim: 4, max_exponent_sum: 6, pairing_budget: super::DEFAULT_PAIRING_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Agree,
    Mismatch { by_coefficient: String, by_wick: String },
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCase {
    pub index: usize,
    pub exponents: ExponentVector,
    pub construction: String,
    pub outcome: OracleOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub seed: u64,
    pub cases: Vec<OracleCase>,
}

impl OracleReport {
    pub fn agreements(&self) -> usize {
        self.cases.iter().filter(|c| c.outcome == OracleOutcome::Agree).count()
    }

    pub fn mismatches(&self) -> usize {
        self.cases.iter().filter(|c| matches!(c.outcome, OracleOutcome::Mismatch { .. })).count()
    }

    pub fn skipped(&self) -> usize {
        self.cases.iter().filter(|c| matches!(c.outcome, OracleOutcome::Skipped(_))).count()
    }
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=5);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Lower-triangular construction mixing zeros, rational constants and
/// symbolic cells; the diagonal is 1 or a nonzero constant.
pub fn random_construction(rng: &mut impl Rng, n: usize) -> Construction {
    let mut next_var = 0usize;
    let cells = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    if j > k {
                        return Cell::Zero;
                    }
                    let roll: u32 = rng.gen_range(0..6);
                    if j == k {
                        return if roll < 4 {
                            Cell::One
                        } else {
                            let mut c = random_rational(rng);
                            while c == BigRational::from_integer(BigInt::from(0)) {
                                c = random_rational(rng);
                            }
                            Cell::Const(c)
                        };
                    }
                    match roll {
                        0 => Cell::Zero,
                        1 | 2 => Cell::Const(random_rational(rng)),
                        _ => {
                            next_var += 1;
                            Cell::Var(format!("y{next_var}"))
                        }
                    }
                })
                .collect()
        })
        .collect();
    Construction::from_cells(cells).expect("random construction is well formed")
}

/// Exponent vector of length `n` with entries ≥ 1 summing to at most `max_sum`.
pub fn random_exponents(rng: &mut impl Rng, n: usize, max_sum: u32) -> ExponentVector {
    let mut m = vec![1u32; n];
    let extra = rng.gen_range(0..=max_sum.saturating_sub(n as u32));
    for _ in 0..extra {
        let j = rng.gen_range(0..n);
        m[j] += 1;
    }
    ExponentVector::new(m).expect("positive exponents")
}

pub fn run_oracle(seed: u64, count: usize, config: &OracleConfig) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    for index in 0..count {
        let n = rng.gen_range(1..=config.max_dim.max(1));
        let exponents = random_exponents(&mut rng, n, config.max_exponent_sum.max(n as u32));
        let construction = random_construction(&mut rng, n);
        let outcome = match moment_by_wick(&construction, &exponents, config.pairing_budget) {
            Err(Error::Resource(reason)) => OracleOutcome::Skipped(reason),
            Err(e) => return Err(e),
            Ok(by_wick) => {
                let by_coefficient = moment_by_coefficient(&construction.covariance(), &exponents)?;
                if by_coefficient == by_wick {
                    OracleOutcome::Agree
                } else {
                    OracleOutcome::Mismatch {
                        by_coefficient: by_coefficient.to_string(),
                        by_wick: by_wick.to_string(),
                    }
                }
            }
        };
        cases.push(OracleCase { index, exponents, construction: construction.describe(), outcome });
    }
    Ok(OracleReport { seed, cases })
}
