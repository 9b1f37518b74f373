//! Exact infeasibility witnesses for Gram systems.
//!
//! A linear functional `L` on polynomials, given by its values `y_μ` on the
//! product monomials of a basis, refutes every SOS representation over that
//! basis when the moment matrix `S_ij = y_{z_i z_j}` is PSD and `L(F) < 0`:
//! otherwise `L(F) = Σ c_k f_kᵀ S f_k ≥ 0`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gram::GramSystem;
use crate::exactmath::{ldlt, rational, Monomial, MultiPoly, PsdVerdict, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualWitness {
    pub basis: Vec<Monomial>,
    /// `y_μ` for every product of two basis monomials.
    pub moments: BTreeMap<Monomial, BigRational>,
    /// `L(F)`, negative.
    pub value: BigRational,
}

impl DualWitness {
    pub fn moment_matrix(&self) -> RationalMatrix {
        let n = self.basis.len();
        let mut s = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.moments.get(&self.basis[i].mul(&self.basis[j])).cloned().unwrap_or_default();
                s.set(j, i, v.clone());
                s.set(i, j, v);
            }
        }
        s
    }

    /// Re-checks the witness against `f` in exact arithmetic.
    pub fn refutes(&self, f: &MultiPoly) -> bool {
        let mut value = BigRational::zero();
        for (m, c) in f.terms() {
            match self.moments.get(m) {
                Some(y) => value += y * c,
                None => return false,
            }
        }
        value == self.value
            && value.is_negative()
            && ldlt(&self.moment_matrix()).is_ok_and(|d| d.verdict == PsdVerdict::Psd)
    }
}

/// Turns a floating dual point (one value per SDP constraint, in `order`) into
/// an exact witness, or `None` if rounding does not produce one.
///
/// The rounded moments are pushed into the PSD cone by adding `δ` times the
/// moments of point evaluations at random rational points, which keeps the
/// moment-matrix structure while adding a positive definite term.
pub fn exact_witness(
    sys: &GramSystem,
    dual: &[f64],
    order: &[Monomial],
    f: &MultiPoly,
    seed: u64,
) -> Option<DualWitness> {
    let n = sys.basis.len();
    let scale = dual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if n == 0 || scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = sys.basis.ring.len();
    let points: Vec<Vec<BigRational>> = (0..n + 2)
        .map(|_| {
            (0..nvars)
                .map(|_| BigRational::new(rng.gen_range(-8i64..=8).into(), rng.gen_range(1i64..=4).into()))
                .collect()
        })
        .collect();
    let eval_sum: BTreeMap<Monomial, BigRational> = sys
        .pairs
        .keys()
        .map(|mu| {
            let s: BigRational = points.iter().map(|x| monomial_value(mu, x)).sum();
            (mu.clone(), s)
        })
        .collect();
    let p_float = moment_float(sys, |mu| rational::to_f64(&eval_sum[mu]));
    let p_min = min_eig(&p_float);
    if p_min <= 0.0 {
        return None;
    }

    for den in [1_000u64, 1_000_000, 1_000_000_000, 1_000_000_000_000] {
        let bound = BigInt::from(den);
        let mut y: BTreeMap<Monomial, BigRational> =
            sys.pairs.keys().map(|mu| (mu.clone(), BigRational::zero())).collect();
        for (mu, v) in order.iter().zip(dual) {
            y.insert(mu.clone(), rational::approx_rational(v / scale, &bound));
        }
        let s_float = moment_float(sys, |mu| rational::to_f64(&y[mu]));
        let s_min = min_eig(&s_float);
        let base = (-s_min).max(0.0) / p_min;
        let mut deltas = vec![BigRational::zero()];
        for factor in [1.5, 10.0, 100.0] {
            let d = base * factor + 1.0 / den as f64;
            deltas.push(rational::approx_rational(d, &BigInt::from(den)).max(BigRational::new(1.into(), den.into())));
        }
        for delta in deltas {
            let moments: BTreeMap<Monomial, BigRational> =
                y.iter().map(|(mu, v)| (mu.clone(), v + &delta * &eval_sum[mu])).collect();
            let value: BigRational = f.terms().map(|(m, c)| &moments[m] * c).sum();
            if !value.is_negative() {
                continue;
            }
            let w = DualWitness { basis: sys.basis.monomials.clone(), moments, value };
            if ldlt(&w.moment_matrix()).is_ok_and(|d| d.verdict == PsdVerdict::Psd) {
                return Some(w);
            }
        }
    }
    None
}

fn monomial_value(mu: &Monomial, x: &[BigRational]) -> BigRational {
    let mut v = BigRational::from_integer(1.into());
    for (xi, &e) in x.iter().zip(mu.exponents()) {
        if e > 0 {
            v *= num_traits::pow(xi.clone(), e as usize);
        }
    }
    v
}

fn moment_float(sys: &GramSystem, value: impl Fn(&Monomial) -> f64) -> DMatrix<f64> {
    let z = &sys.basis.monomials;
    DMatrix::from_fn(z.len(), z.len(), |i, j| value(&z[i].mul(&z[j])))
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}
