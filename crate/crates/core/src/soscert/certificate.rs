use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::basis::GramBasis;
use crate::error::{Error, Result};
use crate::exactmath::{format_rational, ldlt, Monomial, MultiPoly, PsdVerdict, RationalMatrix, Ring};

/// One weighted square `c·f²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosTerm {
    pub coefficient: BigRational,
    pub poly: MultiPoly,
}

/// `Σ c_i f_i²` with positive rational `c_i`, claimed equal to a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosCertificate {
    pub ring: Ring,
    pub target_fingerprint: String,
    pub terms: Vec<SosTerm>,
    /// Gram basis the squares were extracted over (empty for external certificates).
    pub basis: Vec<Monomial>,
    pub provenance: String,
}

impl SosCertificate {
    pub fn new(ring: &Ring, target: &MultiPoly, terms: Vec<SosTerm>, provenance: impl Into<String>) -> Self {
        SosCertificate {
            ring: ring.clone(),
            target_fingerprint: target.fingerprint(),
            terms,
            basis: Vec::new(),
            provenance: provenance.into(),
        }
    }

    /// `Σ c_i f_i²`.
    pub fn expand(&self) -> Result<MultiPoly> {
        let mut total = MultiPoly::zero(&self.ring);
        for t in &self.terms {
            let sq = t.poly.embed(&self.ring)?.pow(2).scale(&t.coefficient);
            total = total.checked_add(&sq)?;
        }
        Ok(total)
    }

    /// Largest `c·f²` over terms whose `f` is a nonzero constant.
    pub fn constant_square(&self) -> Option<BigRational> {
        self.terms
            .iter()
            .filter(|t| t.poly.is_constant() && !t.poly.is_zero() && t.coefficient.is_positive())
            .map(|t| {
                let v = t.poly.constant_term();
                &t.coefficient * &v * &v
            })
            .max()
    }

    /// Value of `Σ c_i f_i(x)²` at a point in ring order, with the individual
    /// summands.
    pub fn evaluate_terms(&self, point: &[BigRational]) -> Result<Vec<BigRational>> {
        self.terms
            .iter()
            .map(|t| {
                let v = t.poly.embed(&self.ring)?.evaluate(point)?;
                Ok(&t.coefficient * &v * &v)
            })
            .collect()
    }
}

impl fmt::Display for SosCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*({})^2", format_rational(&t.coefficient), t.poly)?;
        }
        Ok(())
    }
}

/// Outcome of an exact certificate check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    /// First problem found, e.g. the lowest mismatching monomial.
    pub diagnostic: Option<String>,
}

impl Verification {
    fn pass() -> Self {
        Verification { ok: true, diagnostic: None }
    }

    fn fail(msg: String) -> Self {
        Verification { ok: false, diagnostic: Some(msg) }
    }
}

/// Exact check that every `c_i > 0` and `Σ c_i f_i² − F = 0`.
pub fn verify_certificate(cert: &SosCertificate, f: &MultiPoly) -> Verification {
    if let Some((k, t)) = cert.terms.iter().enumerate().find(|(_, t)| !t.coefficient.is_positive()) {
        return Verification::fail(format!(
            "square {} has non-positive coefficient {}",
            k + 1,
            format_rational(&t.coefficient)
        ));
    }
    let ring = f.ring().union(&cert.ring);
    let expanded = match cert.expand().and_then(|p| p.embed(&ring)) {
        Ok(p) => p,
        Err(e) => return Verification::fail(e.to_string()),
    };
    let target = match f.embed(&ring) {
        Ok(p) => p,
        Err(e) => return Verification::fail(e.to_string()),
    };
    let diff = &expanded - &target;
    if let Some((m, _)) = diff.terms().next() {
        return Verification::fail(format!(
            "mismatch at {}: certificate gives {}, target has {}",
            m.display_with(ring.names()),
            format_rational(&expanded.coefficient_of(m)),
            format_rational(&target.coefficient_of(m))
        ));
    }
    Verification::pass()
}

/// Squares from an exact `LDLᵀ` of a PSD Gram matrix over `basis`.
pub fn extract_sos(g: &RationalMatrix, basis: &GramBasis, target: &MultiPoly) -> Result<SosCertificate> {
    let n = basis.len();
    if g.rows() != n || g.cols() != n {
        return Err(Error::Structural(format!("{}x{} Gram matrix for a basis of {n}", g.rows(), g.cols())));
    }
    let f = ldlt(g)?;
    if f.verdict != PsdVerdict::Psd {
        return Err(Error::Verification("Gram matrix is not positive semidefinite".into()));
    }
    let ring = &basis.ring;
    let mut terms = Vec::new();
    for (k, d) in f.d.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let poly = MultiPoly::from_terms(
            ring,
            (k..n)
                .filter(|&i| !f.l.get(i, k).is_zero())
                .map(|i| (basis.monomials[f.perm[i]].clone(), f.l.get(i, k).clone())),
        )?;
        terms.push(SosTerm { coefficient: d.clone(), poly });
    }
    Ok(SosCertificate {
        ring: ring.clone(),
        target_fingerprint: target.fingerprint(),
        terms,
        basis: basis.monomials.clone(),
        provenance: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    fn ring_x() -> Ring {
        Ring::new(["x"]).unwrap()
    }

    #[test]
    fn rank_one_gram() {
        let ring = ring_x();
        let basis = GramBasis::new(&ring, vec![Monomial::new(vec![0]), Monomial::new(vec![1])]);
        let g = RationalMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        let f = MultiPoly::parse(&ring, "(1 + x)^2").unwrap();
        let cert = extract_sos(&g, &basis, &f).unwrap();
        assert_eq!(cert.terms.len(), 1);
        assert_eq!(cert.terms[0].coefficient, int(1));
        assert_eq!(cert.terms[0].poly, MultiPoly::parse(&ring, "1 + x").unwrap());
        assert!(verify_certificate(&cert, &f).ok);
    }

    #[test]
    fn single_square() {
        let ring = Ring::new(["a"]).unwrap();
        let basis = GramBasis::new(&ring, vec![Monomial::new(vec![1])]);
        let g = RationalMatrix::from_rows(vec![vec![int(2)]]).unwrap();
        let f = MultiPoly::parse(&ring, "2*a^2").unwrap();
        let cert = extract_sos(&g, &basis, &f).unwrap();
        assert_eq!(cert.to_string(), "2*(a)^2");
    }

    #[test]
    fn indefinite_refused() {
        let ring = ring_x();
        let basis = GramBasis::new(&ring, vec![Monomial::new(vec![0]), Monomial::new(vec![1])]);
        let g = RationalMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(1)]]).unwrap();
        assert!(extract_sos(&g, &basis, &MultiPoly::zero(&ring)).is_err());
    }

    #[test]
    fn verification_reports_mismatch() {
        let ring = ring_x();
        let f = MultiPoly::parse(&ring, "x^2 + 1").unwrap();
        let mut cert = SosCertificate::new(
            &ring,
            &f,
            vec![
                SosTerm { coefficient: int(1), poly: MultiPoly::parse(&ring, "x").unwrap() },
                SosTerm { coefficient: int(1), poly: MultiPoly::one(&ring) },
            ],
            "test",
        );
        assert!(verify_certificate(&cert, &f).ok);
        assert_eq!(cert.constant_square(), Some(int(1)));
        cert.terms[1].coefficient += rat(1, 1_000_000);
        let v = verify_certificate(&cert, &f);
        assert!(!v.ok);
        assert!(v.diagnostic.unwrap().starts_with("mismatch at 1"));
        cert.terms[1].coefficient = int(-1);
        assert!(!verify_certificate(&cert, &f).ok);
    }

    #[test]
    fn empty_certificate_of_zero() {
        let ring = ring_x();
        let z = MultiPoly::zero(&ring);
        assert!(verify_certificate(&SosCertificate::new(&ring, &z, vec![], ""), &z).ok);
    }
}
