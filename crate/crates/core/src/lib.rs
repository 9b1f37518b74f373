//! Exact sums-of-squares certification of Gaussian product inequalities.
//!
//! The crate builds the gap polynomial between a mixed even Gaussian moment and
//! the product of the marginal moments, searches for a rational sum-of-squares
//! certificate with a small interior-point SDP solver plus exact rounding, and
//! verifies certificates by exact expansion.

pub mod certfmt;
pub mod error;
pub mod exactmath;
pub mod gapbuild;
pub mod moments;
pub mod sdp;
pub mod soscert;

pub use error::{Error, Result};
pub use exactmath::{BigRational, Monomial, MultiPoly, RationalMatrix, Ring};
pub use gapbuild::{GapInstance, GapPolynomial, Normalization, Subproblem};
pub use moments::{Construction, ExponentVector, SymbolicExponent};
pub use soscert::{certify, verify_certificate, CertifyError, CertifyOptions, SosCertificate, StrictnessVerdict};
