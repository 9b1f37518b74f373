//! Shared inputs for the pipeline benchmarks.

use gpisos::gapbuild::{build_gap, enumerate_cases};
use gpisos::{ExponentVector, GapPolynomial, MultiPoly, Ring};

pub fn gap(exponents: &[u32], case: usize) -> GapPolynomial {
    let m = ExponentVector::new(exponents.to_vec()).expect("positive exponents");
    let cases = enumerate_cases(m.len()).expect("n >= 2");
    build_gap(&m, &cases[case - 1]).expect("gap builds")
}

pub fn motzkin() -> MultiPoly {
    let ring = Ring::new(["x", "y"]).expect("ring");
    MultiPoly::parse(&ring, "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1").expect("parses")
}

pub fn fixture(name: &str) -> Vec<u8> {
    let path = format!("{}/../../fixtures/{name}.gpicert", env!("CARGO_MANIFEST_DIR"));
    std::fs::read(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}
