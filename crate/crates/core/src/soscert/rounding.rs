use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::gram::GramSystem;
use crate::error::{Error, Result};
use crate::exactmath::{rational, RationalMatrix};

/// Rational Gram matrix satisfying `sys` exactly, close to `g`.
///
/// Entries are replaced by their best rational approximations with
/// denominator at most `denom_bound` (entries across sign-symmetry blocks by
/// zero), then moved by the minimum-Frobenius correction onto the affine set
/// of `sys`. Each entry occurs in exactly one constraint, so the normal
/// equations are diagonal: every entry of constraint `μ` shifts by the same
/// `r_μ / w_μ`, with `r_μ` the residual and `w_μ` the constraint weight.
pub fn round_and_project(g: &DMatrix<f64>, sys: &GramSystem, denom_bound: &BigInt) -> Result<RationalMatrix> {
    let n = sys.basis.len();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::Structural(format!("{}x{} matrix for a basis of {n}", g.nrows(), g.ncols())));
    }
    let mut out = RationalMatrix::zeros(n, n);
    let two = BigRational::from_integer(2.into());
    for (mu, list) in &sys.pairs {
        let inside: Vec<(usize, usize)> = sys.block_pairs(list).collect();
        let target = sys.rhs_of(mu);
        if inside.is_empty() {
            if !target.is_zero() {
                return Err(Error::Structural(format!(
                    "constraint for {} cannot be met inside the sign-symmetry blocks",
                    mu.display_with(sys.basis.ring.names())
                )));
            }
            continue;
        }
        let mut values = Vec::with_capacity(inside.len());
        let mut weight = BigRational::zero();
        let mut sum = BigRational::zero();
        for &(i, j) in &inside {
            let v = rational::approx_rational(0.5 * (g[(i, j)] + g[(j, i)]), denom_bound);
            if i == j {
                sum += &v;
                weight += BigRational::from_integer(1.into());
            } else {
                sum += &v * &two;
                weight += &two;
            }
            values.push(v);
        }
        let shift = (target - sum) / weight;
        for (&(i, j), v) in inside.iter().zip(values) {
            let v = v + &shift;
            out.set(j, i, v.clone());
            out.set(i, j, v);
        }
    }
    Ok(out)
}
