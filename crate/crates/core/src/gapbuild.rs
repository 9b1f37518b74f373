//! Gap polynomials `F = E[∏ X_j^{2m_j}] − ∏ (2m_j − 1)!! Λ_jj^{m_j}` over
//! degenerate constructions, their reduction subproblems, and the `H`
//! polynomial of the SOS strengthening.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{domain, structural, Result};
use crate::exactmath::{Monomial, MultiPoly, Ring};
use crate::moments::{
    gaussian_even_moment, marginal_moment, moment_by_coefficient, symbolic_moment, symbolic_ring, Cell,
    Construction, CovarianceForm, ExponentVector, SymbolicExponent, SYMBOLIC_EXPONENT_VAR,
};

/// Variable carrying the symbolic exponent after `m = p² + 1`.
pub const SYMBOLIC_SQUARE_ROOT_VAR: &str = "p";

/// Letters handed to free construction coefficients, skipping `m` and `p`.
const CASE_LETTERS: &str = "abcdefghijklnoqrstuvwxyz";

/// Scale under which a gap polynomial is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// The plain difference of moments.
    Unit,
    /// Divided by `2 (2m − 1)!!`, `m` being the symbolic exponent.
    TwiceDoubleFactorial,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Unit => "1",
            Normalization::TwiceDoubleFactorial => "2(2m-1)!!",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "1" => Some(Normalization::Unit),
            "2(2m-1)!!" => Some(Normalization::TwiceDoubleFactorial),
            _ => None,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One certification target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapInstance {
    pub exponents: ExponentVector,
    pub construction: Construction,
    /// Last exponent `k` when the instance comes from the reduction.
    pub reduction_k: Option<u32>,
    /// 1-based index into [`enumerate_cases`].
    pub case_id: Option<usize>,
    pub symbolic: Option<SymbolicExponent>,
}

impl GapInstance {
    pub fn new(exponents: ExponentVector, construction: Construction) -> Self {
        GapInstance { exponents, construction, reduction_k: None, case_id: None, symbolic: None }
    }

    /// Exponent list with `m` in the symbolic slot, e.g. `m,3,2`.
    pub fn exponent_label(&self) -> String {
        exponent_label(&self.exponents, self.symbolic.as_ref())
    }

    /// Short identifier such as `F_{2,1,1,1} case 3`.
    pub fn label(&self) -> String {
        let mut s = format!("F_{{{}}}", self.exponent_label());
        if let Some(c) = self.case_id {
            s.push_str(&format!(" case {c}"));
        }
        s
    }

    /// `exponents=2,1,1,1 case=3`, as recorded in certificate files.
    pub fn descriptor(&self) -> String {
        let mut s = format!("exponents={}", self.exponent_label());
        if let Some(c) = self.case_id {
            s.push_str(&format!(" case={c}"));
        }
        s
    }

    /// Inverse of [`GapInstance::descriptor`]; the case selects the
    /// construction from [`enumerate_cases`].
    pub fn from_descriptor(text: &str) -> Result<GapInstance> {
        let mut exponents = None;
        let mut case = None;
        for field in text.split_whitespace() {
            match field.split_once('=') {
                Some(("exponents", v)) => exponents = Some(parse_exponents(v)?),
                Some(("case", v)) => {
                    case = Some(v.parse::<usize>().map_err(|_| domain!("bad case number {v:?}"))?)
                }
                _ => return Err(domain!("unknown instance field {field:?}")),
            }
        }
        let (m, symbolic) = exponents.ok_or_else(|| domain!("instance descriptor lacks exponents"))?;
        let case = case.ok_or_else(|| domain!("instance descriptor lacks a case"))?;
        let cases = enumerate_cases(m.len())?;
        let construction = case
            .checked_sub(1)
            .and_then(|i| cases.get(i))
            .ok_or_else(|| domain!("case {case} out of range 1..={}", cases.len()))?
            .clone();
        Ok(GapInstance { exponents: m, construction, reduction_k: None, case_id: Some(case), symbolic })
    }

    /// Machine-friendly form of [`GapInstance::label`], e.g. `F_2-1-1-1_case3`.
    pub fn slug(&self) -> String {
        let mut s = format!("F_{}", self.exponent_label().replace(',', "-"));
        if let Some(c) = self.case_id {
            s.push_str(&format!("_case{c}"));
        }
        s
    }
}

pub fn exponent_label(m: &ExponentVector, sym: Option<&SymbolicExponent>) -> String {
    m.as_slice()
        .iter()
        .enumerate()
        .map(|(j, e)| match sym {
            Some(s) if s.coordinate == j => SYMBOLIC_EXPONENT_VAR.to_string(),
            _ => e.to_string(),
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses `4,3,2` or `m,3,2`. A symbolic slot is stored as exponent 1.
pub fn parse_exponents(text: &str) -> Result<(ExponentVector, Option<SymbolicExponent>)> {
    let mut m = Vec::new();
    let mut sym = None;
    for (j, part) in text.split(',').enumerate() {
        let part = part.trim();
        if part == SYMBOLIC_EXPONENT_VAR {
            if sym.is_some() {
                return Err(domain!("only one symbolic exponent is supported"));
            }
            sym = Some(SymbolicExponent { coordinate: j });
            m.push(1);
        } else {
            let v: u32 = part.parse().map_err(|_| domain!("bad exponent {part:?} in {text:?}"))?;
            m.push(v);
        }
    }
    Ok((ExponentVector::new(m)?, sym))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapPolynomial {
    pub instance: GapInstance,
    pub poly: MultiPoly,
    pub normalization: Normalization,
}

/// A reduction obligation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subproblem {
    /// Certify this instance; `strict_required` on the top `k` when `n ≥ 3`.
    Instance { instance: GapInstance, strict_required: bool },
    /// Certify the lower-dimensional exponent vector by the same procedure.
    Recursive(ExponentVector),
}

/// Degenerate constructions in which `X_n` lies in the span of `X_1..X_{n-1}`.
///
/// For `n ≥ 3`, `X_1 = U_1` and `X_2 = a U_1 + U_2`; each later row either
/// opens a new direction (free coefficients on the directions used so far,
/// unit on the next one) or stays (free coefficients on all but the newest
/// direction, unit on the newest). The all-new pattern is full rank and is
/// excluded. Patterns are listed lexicographically with new before stay, so
/// case 1 has `span(X_1..X_{n-1})` of full dimension `n − 1`.
pub fn enumerate_cases(n: usize) -> Result<Vec<Construction>> {
    if n < 2 {
        return Err(domain!("case enumeration needs n >= 2, got {n}"));
    }
    if n == 2 {
        let c = Construction::from_cells(vec![
            vec![Cell::One, Cell::Zero],
            vec![Cell::Var("a".into()), Cell::Zero],
        ])?;
        return Ok(vec![c]);
    }
    let free = n - 2;
    let mut out = Vec::new();
    // Bit i set means row i+3 stays in the current span.
    for mask in 0u64..(1u64 << free) {
        let pattern: Vec<bool> = (0..free).map(|i| mask >> (free - 1 - i) & 1 == 1).collect();
        if pattern.iter().all(|stay| !stay) {
            continue;
        }
        out.push(case_construction(n, &pattern)?);
    }
    Ok(out)
}

fn case_construction(n: usize, stays: &[bool]) -> Result<Construction> {
    let mut letters = CASE_LETTERS.chars();
    let mut next = || -> Result<Cell> {
        letters
            .next()
            .map(|c| Cell::Var(c.to_string()))
            .ok_or_else(|| domain!("too many free coefficients for n = {n}"))
    };
    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(n);
    let mut row0 = vec![Cell::Zero; n];
    row0[0] = Cell::One;
    rows.push(row0);
    let mut row1 = vec![Cell::Zero; n];
    row1[0] = next()?;
    row1[1] = Cell::One;
    rows.push(row1);
    let mut dims = 2usize;
    for &stay in stays {
        let mut row = vec![Cell::Zero; n];
        if stay {
            for cell in row.iter_mut().take(dims - 1) {
                *cell = next()?;
            }
            row[dims - 1] = Cell::One;
        } else {
            for cell in row.iter_mut().take(dims) {
                *cell = next()?;
            }
            row[dims] = Cell::One;
            dims += 1;
        }
        rows.push(row);
    }
    Construction::from_cells(rows)
}

fn product_term(c: &Construction, m: &ExponentVector, skip: Option<usize>) -> MultiPoly {
    let cov = c.covariance();
    let mut acc = MultiPoly::one(c.ring());
    for (k, &mk) in m.as_slice().iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        acc = &acc * &marginal_moment(cov.get(k, k), mk);
    }
    acc
}

/// Concrete gap polynomial, unnormalized.
pub fn build_gap(exponents: &ExponentVector, c: &Construction) -> Result<GapPolynomial> {
    build_instance(&GapInstance::new(exponents.clone(), c.clone()))
}

/// Builds the polynomial of any instance, symbolic or concrete.
pub fn build_instance(instance: &GapInstance) -> Result<GapPolynomial> {
    let c = &instance.construction;
    let m = &instance.exponents;
    if c.n() != m.len() {
        return Err(structural!("construction of dimension {} with {} exponents", c.n(), m.len()));
    }
    match instance.symbolic {
        None => {
            let moment = moment_by_coefficient(&c.covariance(), m)?;
            let poly = &moment - &product_term(c, m, None);
            Ok(GapPolynomial { instance: instance.clone(), poly, normalization: Normalization::Unit })
        }
        Some(sym) => {
            let in_m = symbolic_gap_in_m(c, m, &sym)?;
            if c.ring().index_of(SYMBOLIC_SQUARE_ROOT_VAR).is_some() {
                return Err(structural!("construction already uses {SYMBOLIC_SQUARE_ROOT_VAR:?}"));
            }
            let p_ring = Ring::new([SYMBOLIC_SQUARE_ROOT_VAR])?;
            let p = MultiPoly::var(&p_ring, SYMBOLIC_SQUARE_ROOT_VAR)?;
            let m_of_p = &(&p * &p) + &MultiPoly::one(&p_ring);
            let poly = in_m.substitute(SYMBOLIC_EXPONENT_VAR, &m_of_p)?;
            Ok(GapPolynomial {
                instance: instance.clone(),
                poly,
                normalization: Normalization::TwiceDoubleFactorial,
            })
        }
    }
}

/// `F / (2 (2m − 1)!!)` as a polynomial in the construction variables and `m`.
fn symbolic_gap_in_m(c: &Construction, m: &ExponentVector, sym: &SymbolicExponent) -> Result<MultiPoly> {
    let moment = symbolic_moment(c, m, sym)?;
    // The symbolic row is pure, so Λ_ss = 1 and its marginal is (2m−1)!!.
    let product = product_term(c, m, Some(sym.coordinate)).embed(&symbolic_ring(c)?)?;
    Ok((&moment - &product).scale(&BigRational::new(BigInt::one(), BigInt::from(2))))
}

/// Symbolic gap with the first coordinate symbolic; its entry in `exponents`
/// is ignored.
pub fn build_gap_symbolic(exponents: &ExponentVector, c: &Construction) -> Result<GapPolynomial> {
    let mut instance = GapInstance::new(exponents.clone(), c.clone());
    instance.symbolic = Some(SymbolicExponent { coordinate: 0 });
    build_instance(&instance)
}

/// Evaluates a symbolic gap at `m = mstar` and undoes the normalization,
/// giving the concrete gap polynomial with exponent `mstar`.
pub fn specialize_symbolic(gap: &GapPolynomial, mstar: u32) -> Result<MultiPoly> {
    if gap.normalization != Normalization::TwiceDoubleFactorial || mstar == 0 {
        return Err(domain!("specialization needs a symbolic gap and m >= 1"));
    }
    let ring = gap.poly.ring();
    let pi = ring
        .index_of(SYMBOLIC_SQUARE_ROOT_VAR)
        .ok_or_else(|| structural!("symbolic gap without {SYMBOLIC_SQUARE_ROOT_VAR:?}"))?;
    let target = ring.without(SYMBOLIC_SQUARE_ROOT_VAR);
    let p2 = BigInt::from(mstar - 1);
    let mut terms = Vec::with_capacity(gap.poly.len());
    for (mono, coeff) in gap.poly.terms() {
        let e = mono.exponents();
        if e[pi] % 2 == 1 {
            return Err(domain!("odd power of {SYMBOLIC_SQUARE_ROOT_VAR} in a symbolic gap"));
        }
        let rest: Vec<u32> =
            e.iter().enumerate().filter(|&(i, _)| i != pi).map(|(_, &x)| x).collect();
        let factor = BigRational::from_integer(p2.pow(e[pi] / 2));
        terms.push((Monomial::new(rest), coeff * factor));
    }
    let scale = BigRational::from_integer(BigInt::from(2) * gaussian_even_moment(mstar));
    Ok(MultiPoly::from_terms(&target, terms)?.scale(&scale))
}

/// Reduction obligations: every case with last exponent `k = 1..=m_n`, the
/// top `k` flagged strict, then the `(n−1)`-dimensional vector for `k = 0`.
///
/// At `n = 2` the gap is `c·a^{2k}`, zero exactly when `X_2 ≡ 0`, so
/// nothing is flagged strict there.
pub fn enumerate_subproblems(
    exponents: &ExponentVector,
    symbolic: Option<SymbolicExponent>,
) -> Result<Vec<Subproblem>> {
    let n = exponents.len();
    if n < 2 {
        return Err(domain!("reduction needs at least two coordinates"));
    }
    if let Some(s) = symbolic {
        if s.coordinate == n - 1 {
            return Err(domain!("the reduced coordinate cannot be symbolic"));
        }
    }
    let top = *exponents.as_slice().last().expect("non-empty");
    let cases = enumerate_cases(n)?;
    let mut out = Vec::new();
    for (idx, c) in cases.iter().enumerate() {
        for k in 1..=top {
            let instance = GapInstance {
                exponents: exponents.with_last(k)?,
                construction: c.clone(),
                reduction_k: Some(k),
                case_id: Some(idx + 1),
                symbolic,
            };
            out.push(Subproblem::Instance { instance, strict_required: k == top && n >= 3 });
        }
    }
    if n >= 3 {
        out.push(Subproblem::Recursive(exponents.without_last().expect("n >= 3")));
    }
    Ok(out)
}

/// `H = E[U_1^{2m_1} ∏_{i≥2} X_i^{2m_i}] − (2m_1−1)!! ∏_{i≥2} E[X_i^{2m_i}]`
/// with `X_i = Σ_{j<i} x_ij U_j + U_i`, over the variables `x21, x31, x32, …`.
pub fn build_conjecture_h(n: usize, exponents: &ExponentVector) -> Result<MultiPoly> {
    if n < 3 {
        return Err(domain!("H is defined for n >= 3, got {n}"));
    }
    if exponents.len() != n {
        return Err(structural!("n = {n} with {} exponents", exponents.len()));
    }
    let c = Construction::unit_lower_triangular(n);
    let moment = moment_by_coefficient(&c.covariance(), exponents)?;
    let m = exponents.as_slice();
    let mut product = MultiPoly::constant(c.ring(), BigRational::from_integer(gaussian_even_moment(m[0])));
    let cov = c.covariance();
    for (i, &mi) in m.iter().enumerate().skip(1) {
        // E[X_i^{2m_i}] as a one-dimensional moment with variance Λ_ii.
        let marginal_cov = CovarianceForm::from_entries(vec![vec![cov.get(i, i).clone()]])?;
        let marginal = moment_by_coefficient(&marginal_cov, &ExponentVector::new(vec![mi])?)?;
        product = &product * &marginal;
    }
    Ok(&moment - &product)
}
