//! Exact rational arithmetic: sparse multivariate polynomials, dense rational
//! matrices, `LDLᵀ` and linear solves. Nothing in here ever touches a float
//! except the explicit conversion helpers in [`rational`].

mod matrix;
mod monomial;
mod poly;
pub mod rational;

pub use matrix::{ldlt, solve_linear, LinearSolution, Ldlt, PsdVerdict, RationalMatrix};
pub use monomial::Monomial;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::{MultiPoly, Ring};
pub use rational::{format_rational, int, parse_rational, rat};
