//! Exact mixed even moments of centered Gaussian vectors written as
//! `X_k = Σ_j x_kj U_j` over independent standard Gaussians `U_j`.
//!
//! Three routes are provided and cross-checked in tests:
//! * [`moment_by_coefficient`]: coefficient extraction from a power of the
//!   covariance quadratic form,
//! * [`moment_by_wick`]: perfect-matching (Isserlis) enumeration,
//! * [`symbolic_moment`]: expansion in the `U_j` with one exponent left symbolic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{domain, structural, Error, Result};
use crate::exactmath::rational::factorial;
use crate::exactmath::{MultiPoly, Ring};

pub mod oracle;

/// Largest number of Gaussian factors the Wick oracle accepts by default.
pub const DEFAULT_PAIRING_BUDGET: u32 = 24;

/// Name of the symbolic exponent variable in [`symbolic_moment`] output.
pub const SYMBOLIC_EXPONENT_VAR: &str = "m";

/// Exponents `m_1, …, m_n`; coordinate `j` is raised to `2 m_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() {
            return Err(domain!("exponent vector must be non-empty"));
        }
        if m.contains(&0) {
            return Err(domain!("exponents must be positive, got {m:?}"));
        }
        Ok(ExponentVector(m))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn with_last(&self, k: u32) -> Result<Self> {
        let mut m = self.0.clone();
        *m.last_mut().expect("non-empty") = k;
        Self::new(m)
    }

    pub fn without_last(&self) -> Option<Self> {
        if self.0.len() < 2 {
            return None;
        }
        Some(ExponentVector(self.0[..self.0.len() - 1].to_vec()))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// One cell of a construction matrix.
#[derive(Clone, Debug)]
pub enum Cell {
    Zero,
    One,
    Const(BigRational),
    Var(String),
}

/// Coefficients `x_kj` of `X_k = Σ_j x_kj U_j`, each a polynomial in the
/// construction variables (in practice a single variable or a constant).
#[derive(Clone, PartialEq, Eq)]
pub struct Construction {
    ring: Ring,
    rows: Vec<Vec<MultiPoly>>,
}

impl Construction {
    /// Square `n × n` construction from polynomial entries over `ring`.
    pub fn new(ring: Ring, rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(structural!("construction needs at least one row"));
        }
        for row in &rows {
            if row.len() != n {
                return Err(structural!("construction must be square, got a row of {}", row.len()));
            }
            if row.iter().any(|p| p.ring() != &ring) {
                return Err(structural!("construction entry outside the construction ring"));
            }
        }
        Ok(Construction { ring, rows })
    }

    /// Builds a construction from cells; variables form the ring in row-major
    /// order of first appearance and each may occupy only one cell.
    pub fn from_cells(cells: Vec<Vec<Cell>>) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for row in &cells {
            for cell in row {
                if let Cell::Var(name) = cell {
                    if names.contains(name) {
                        return Err(structural!("variable {name:?} used in more than one cell"));
                    }
                    names.push(name.clone());
                }
            }
        }
        let ring = Ring::new(names)?;
        let rows = cells
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|cell| match cell {
                        Cell::Zero => Ok(MultiPoly::zero(&ring)),
                        Cell::One => Ok(MultiPoly::one(&ring)),
                        Cell::Const(c) => Ok(MultiPoly::constant(&ring, c)),
                        Cell::Var(name) => MultiPoly::var(&ring, &name),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, rows)
    }

    /// `X_k = U_k`: independent coordinates.
    pub fn identity(n: usize) -> Self {
        let cells = (0..n)
            .map(|k| (0..n).map(|j| if j == k { Cell::One } else { Cell::Zero }).collect())
            .collect();
        Self::from_cells(cells).expect("identity construction is well formed")
    }

    /// `X_1 = U_1`, `X_i = Σ_{j<i} x_ij U_j + U_i` with variables named `x21, x31, x32, …`.
    pub fn unit_lower_triangular(n: usize) -> Self {
        let cells = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| match j.cmp(&k) {
                        std::cmp::Ordering::Less => Cell::Var(format!("x{}{}", k + 1, j + 1)),
                        std::cmp::Ordering::Equal => Cell::One,
                        std::cmp::Ordering::Greater => Cell::Zero,
                    })
                    .collect()
            })
            .collect();
        Self::from_cells(cells).expect("lower triangular construction is well formed")
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn entry(&self, k: usize, j: usize) -> &MultiPoly {
        &self.rows[k][j]
    }

    /// Row `k` is exactly `U_k`.
    pub fn row_is_pure(&self, k: usize) -> bool {
        self.rows[k]
            .iter()
            .enumerate()
            .all(|(j, e)| if j == k { *e == MultiPoly::one(&self.ring) } else { e.is_zero() })
    }

    pub fn covariance(&self) -> CovarianceForm {
        let n = self.n();
        let mut entries = vec![vec![MultiPoly::zero(&self.ring); n]; n];
        for k in 0..n {
            for l in k..n {
                let mut s = MultiPoly::zero(&self.ring);
                for j in 0..n {
                    if !self.rows[k][j].is_zero() && !self.rows[l][j].is_zero() {
                        s = &s + &(&self.rows[k][j] * &self.rows[l][j]);
                    }
                }
                entries[k][l] = s.clone();
                entries[l][k] = s;
            }
        }
        CovarianceForm { entries }
    }

    /// Multiplies row `k` by `lambda`.
    pub fn scale_row(&self, k: usize, lambda: &BigRational) -> Construction {
        let mut rows = self.rows.clone();
        rows[k] = rows[k].iter().map(|e| e.scale(lambda)).collect();
        Construction { ring: self.ring.clone(), rows }
    }

    /// Reorders coordinates: new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Construction {
        Construction { ring: self.ring.clone(), rows: perm.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    /// Human-readable listing, e.g. `X1 = U1; X2 = a*U1 + U2`.
    pub fn describe(&self) -> String {
        let mut out = Vec::new();
        for (k, row) in self.rows.iter().enumerate() {
            let mut parts = Vec::new();
            for (j, e) in row.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let u = format!("U{}", j + 1);
                if *e == MultiPoly::one(&self.ring) {
                    parts.push(u);
                } else if e.len() == 1 {
                    parts.push(format!("{e}*{u}"));
                } else {
                    parts.push(format!("({e})*{u}"));
                }
            }
            let mut rhs = String::new();
            for (i, p) in parts.iter().enumerate() {
                match (i, p.strip_prefix('-')) {
                    (0, _) => rhs.push_str(p),
                    (_, Some(rest)) => rhs.push_str(&format!(" - {rest}")),
                    (_, None) => rhs.push_str(&format!(" + {p}")),
                }
            }
            if rhs.is_empty() {
                rhs.push('0');
            }
            out.push(format!("X{} = {rhs}", k + 1));
        }
        out.join("; ")
    }
}

impl fmt::Debug for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Construction({})", self.describe())
    }
}

/// Covariance entries `Λ_kl = Σ_j x_kj x_lj` as polynomials in the
/// construction variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceForm {
    entries: Vec<Vec<MultiPoly>>,
}

impl CovarianceForm {
    /// Symmetric table of entries over one ring.
    pub fn from_entries(entries: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(structural!("covariance must be a non-empty square table"));
        }
        let ring = entries[0][0].ring().clone();
        for k in 0..n {
            for l in 0..n {
                if entries[k][l].ring() != &ring {
                    return Err(structural!("covariance entries over different rings"));
                }
                if entries[k][l] != entries[l][k] {
                    return Err(structural!("covariance is not symmetric at ({k},{l})"));
                }
            }
        }
        Ok(CovarianceForm { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, k: usize, l: usize) -> &MultiPoly {
        &self.entries[k][l]
    }

    pub fn ring(&self) -> &Ring {
        self.entries[0][0].ring()
    }
}

/// The coordinate whose exponent is left symbolic. Its construction row must
/// be the pure basis row `U_coordinate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicExponent {
    pub coordinate: usize,
}

/// `k!!` for odd `k ≥ -1`, with `(-1)!! = 1`.
pub fn double_factorial(k: i64) -> Result<BigInt> {
    if k < -1 || k % 2 == 0 {
        return Err(domain!("double factorial defined here for odd k >= -1, got {k}"));
    }
    let mut acc = BigInt::one();
    let mut i = k;
    while i > 1 {
        acc *= BigInt::from(i);
        i -= 2;
    }
    Ok(acc)
}

/// `E[U^{2j}] = (2j-1)!!` for a standard Gaussian `U`.
pub(crate) fn gaussian_even_moment(j: u32) -> BigInt {
    double_factorial(2 * i64::from(j) - 1).expect("odd argument")
}

/// Polynomial in the construction variables plus a table of auxiliary
/// exponent keys (powers of `t_k` or of `U_j`).
type Nested = BTreeMap<Vec<u32>, MultiPoly>;

fn nested_mul(a: &Nested, b: &Nested, cap: Option<&[u32]>) -> Nested {
    let mut out: Nested = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if let Some(cap) = cap {
                if e.iter().zip(cap).any(|(x, c)| x > c) {
                    continue;
                }
            }
            let prod = ca * cb;
            if prod.is_zero() {
                continue;
            }
            match out.get_mut(&e) {
                Some(acc) => {
                    *acc = &*acc + &prod;
                    if acc.is_zero() {
                        out.remove(&e);
                    }
                }
                None => {
                    out.insert(e, prod);
                }
            }
        }
    }
    out
}

fn nested_pow(base: &Nested, k: u32, cap: Option<&[u32]>, ring: &Ring, width: usize) -> Nested {
    let mut acc: Nested = BTreeMap::new();
    acc.insert(vec![0; width], MultiPoly::one(ring));
    for _ in 0..k {
        acc = nested_mul(&acc, base, cap);
    }
    acc
}

/// `E[∏ X_j^{2 m_j}]` as the coefficient of `∏ t_j^{2 m_j}` in
/// `(Σ_{k,l} Λ_kl t_k t_l)^{Σ m_j}`, scaled by `∏ (2m_j)! / (2^{Σ m_j} (Σ m_j)!)`.
pub fn moment_by_coefficient(cov: &CovarianceForm, m: &ExponentVector) -> Result<MultiPoly> {
    let n = cov.n();
    if n != m.len() {
        return Err(structural!("covariance of dimension {n} with {} exponents", m.len()));
    }
    let ring = cov.ring().clone();
    let target: Vec<u32> = m.as_slice().iter().map(|x| 2 * x).collect();

    let mut form: Nested = BTreeMap::new();
    let two = BigRational::from_integer(BigInt::from(2));
    for k in 0..n {
        for l in k..n {
            let entry = cov.get(k, l);
            if entry.is_zero() {
                continue;
            }
            let mut e = vec![0u32; n];
            e[k] += 1;
            e[l] += 1;
            let coeff = if k == l { entry.clone() } else { entry.scale(&two) };
            form.insert(e, coeff);
        }
    }

    let total = m.sum();
    let power = nested_pow(&form, total, Some(&target), &ring, n);
    let coefficient = power.get(&target).cloned().unwrap_or_else(|| MultiPoly::zero(&ring));

    let numer: BigInt = m.as_slice().iter().map(|&x| factorial(2 * x)).product();
    let denom = BigInt::from(2).pow(total) * factorial(total);
    Ok(coefficient.scale(&BigRational::new(numer, denom)))
}

/// Wick oracle: `E[∏ X_j^{2 m_j}]` by perfect-matching enumeration.
pub fn moment_by_wick(c: &Construction, m: &ExponentVector, budget: u32) -> Result<MultiPoly> {
    let powers: Vec<u32> = m.as_slice().iter().map(|x| 2 * x).collect();
    wick_expectation(c, &powers, budget)
}

/// `E[∏ X_j^{powers_j}]` for arbitrary non-negative powers via Isserlis'
/// theorem: the first unpaired factor is matched with every remaining factor
/// in turn, factors of the same coordinate aggregated by multiplicity.
pub fn wick_expectation(c: &Construction, powers: &[u32], budget: u32) -> Result<MultiPoly> {
    if powers.len() != c.n() {
        return Err(structural!("{} powers for a construction of dimension {}", powers.len(), c.n()));
    }
    let total: u32 = powers.iter().sum();
    if total > budget {
        return Err(Error::Resource(format!(
            "{total} Gaussian factors exceed the pairing budget of {budget}"
        )));
    }
    if total % 2 == 1 {
        return Ok(MultiPoly::zero(c.ring()));
    }
    let cov = c.covariance();
    let mut memo: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    Ok(pair_up(&cov, powers.to_vec(), &mut memo))
}

fn pair_up(cov: &CovarianceForm, counts: Vec<u32>, memo: &mut HashMap<Vec<u32>, MultiPoly>) -> MultiPoly {
    let Some(first) = counts.iter().position(|&x| x > 0) else {
        return MultiPoly::one(cov.ring());
    };
    if let Some(hit) = memo.get(&counts) {
        return hit.clone();
    }
    let mut rest = counts.clone();
    rest[first] -= 1;
    let mut acc = MultiPoly::zero(cov.ring());
    for partner in 0..rest.len() {
        let ways = rest[partner];
        if ways == 0 || cov.get(first, partner).is_zero() {
            continue;
        }
        let mut next = rest.clone();
        next[partner] -= 1;
        let sub = pair_up(cov, next, memo);
        if sub.is_zero() {
            continue;
        }
        let term = (&sub * cov.get(first, partner)).scale_int(&BigInt::from(ways));
        acc = &acc + &term;
    }
    memo.insert(counts, acc.clone());
    acc
}

/// `E[U^{2m+2k}] / (2m-1)!! = ∏_{i=1}^{k} (2m + 2i - 1)` as a polynomial in `m`
/// over `ring`, which must contain [`SYMBOLIC_EXPONENT_VAR`].
pub fn normalized_symbolic_gaussian_moment(ring: &Ring, k: u32) -> Result<MultiPoly> {
    let m = MultiPoly::var(ring, SYMBOLIC_EXPONENT_VAR)?;
    let two_m = m.scale(&BigRational::from_integer(BigInt::from(2)));
    let mut acc = MultiPoly::one(ring);
    for i in 1..=k {
        let factor = &two_m + &MultiPoly::constant(ring, BigRational::from_integer(BigInt::from(2 * i - 1)));
        acc = &acc * &factor;
    }
    Ok(acc)
}

/// Ring of a symbolic moment: the construction variables followed by `m`.
pub fn symbolic_ring(c: &Construction) -> Result<Ring> {
    if c.ring().index_of(SYMBOLIC_EXPONENT_VAR).is_some() {
        return Err(structural!(
            "construction already uses the symbolic exponent name {SYMBOLIC_EXPONENT_VAR:?}"
        ));
    }
    Ok(c.ring().union(&Ring::new([SYMBOLIC_EXPONENT_VAR])?))
}

/// `E[X_s^{2m} ∏_{k≠s} X_k^{2 m_k}] / (2m-1)!!` as a polynomial in the
/// construction variables and `m`, where `s = sym.coordinate`.
///
/// The entry of `m` at the symbolic coordinate is ignored. Row `s` must be the
/// pure basis row `U_s`, so the symbolic factor is a power of one standard
/// Gaussian independent of the other directions.
pub fn symbolic_moment(c: &Construction, m: &ExponentVector, sym: &SymbolicExponent) -> Result<MultiPoly> {
    let n = c.n();
    let s = sym.coordinate;
    if m.len() != n {
        return Err(structural!("construction of dimension {n} with {} exponents", m.len()));
    }
    if s >= n {
        return Err(domain!("symbolic coordinate {s} out of range"));
    }
    if !c.row_is_pure(s) {
        return Err(domain!("symbolic coordinate {} is not a pure basis row", s + 1));
    }
    let ring = c.ring().clone();
    let out_ring = symbolic_ring(c)?;

    // Expand ∏_{k≠s} X_k^{2 m_k} in the U_j.
    let mut product: Nested = BTreeMap::new();
    product.insert(vec![0; n], MultiPoly::one(&ring));
    for k in (0..n).filter(|&k| k != s) {
        let mut row: Nested = BTreeMap::new();
        for j in 0..n {
            if !c.entry(k, j).is_zero() {
                let mut e = vec![0u32; n];
                e[j] = 1;
                row.insert(e, c.entry(k, j).clone());
            }
        }
        let pow = nested_pow(&row, 2 * m.as_slice()[k], None, &ring, n);
        product = nested_mul(&product, &pow, None);
    }

    let mut out = MultiPoly::zero(&out_ring);
    for (alpha, coeff) in &product {
        if alpha.iter().any(|a| a % 2 == 1) {
            continue;
        }
        let mut weight = BigInt::one();
        for (j, &a) in alpha.iter().enumerate() {
            if j != s {
                weight *= gaussian_even_moment(a / 2);
            }
        }
        let sym_part = normalized_symbolic_gaussian_moment(&out_ring, alpha[s] / 2)?;
        let term = &coeff.embed(&out_ring)?.scale_int(&weight) * &sym_part;
        out = &out + &term;
    }
    Ok(out)
}

/// Evaluates a polynomial containing `m` at an integer exponent.
pub fn evaluate_symbolic_exponent(p: &MultiPoly, m: u32) -> Result<MultiPoly> {
    let value = MultiPoly::constant(&Ring::empty(), BigRational::from_integer(BigInt::from(m)));
    p.substitute(SYMBOLIC_EXPONENT_VAR, &value)
}

/// Moment of a single coordinate: `(2m-1)!! Λ^m`.
pub(crate) fn marginal_moment(variance: &MultiPoly, m: u32) -> MultiPoly {
    variance.pow(m).scale_int(&gaussian_even_moment(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::int;

    fn ev(m: &[u32]) -> ExponentVector {
        ExponentVector::new(m.to_vec()).unwrap()
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::one());
        assert_eq!(double_factorial(5).unwrap(), BigInt::from(15));
        assert_eq!(double_factorial(7).unwrap(), BigInt::from(105));
        assert!(double_factorial(4).is_err());
        assert!(double_factorial(-3).is_err());
    }

    #[test]
    fn one_dimensional_fourth_moment() {
        // 4!/(2^2 2!) Λ11^2 = 3 Λ11^2
        let c = Construction::from_cells(vec![vec![Cell::Var("s".into())]]).unwrap();
        let got = moment_by_coefficient(&c.covariance(), &ev(&[2])).unwrap();
        assert_eq!(got, MultiPoly::parse(c.ring(), "3*s^4").unwrap());
    }

    #[test]
    fn two_dimensional_isserlis() {
        // E[X1^2 X2^2] = Λ11 Λ22 + 2 Λ12^2 with X1 = U1, X2 = a U1 + U2.
        let c = Construction::from_cells(vec![
            vec![Cell::One, Cell::Zero],
            vec![Cell::Var("a".into()), Cell::One],
        ])
        .unwrap();
        let by_coeff = moment_by_coefficient(&c.covariance(), &ev(&[1, 1])).unwrap();
        let expected = MultiPoly::parse(c.ring(), "(a^2+1) + 2*a^2").unwrap();
        assert_eq!(by_coeff, expected);
        assert_eq!(moment_by_wick(&c, &ev(&[1, 1]), DEFAULT_PAIRING_BUDGET).unwrap(), expected);
    }

    #[test]
    fn diagonal_covariance_factorizes() {
        let c = Construction::identity(3);
        let got = moment_by_coefficient(&c.covariance(), &ev(&[2, 1, 3])).unwrap();
        assert_eq!(got, MultiPoly::constant(c.ring(), int(3 * 15)));
    }

    #[test]
    fn wick_small_cases() {
        let c1 = Construction::identity(1);
        assert_eq!(wick_expectation(&c1, &[4], 24).unwrap(), MultiPoly::constant(c1.ring(), int(3)));
        let c2 = Construction::from_cells(vec![
            vec![Cell::One, Cell::Zero],
            vec![Cell::Var("a".into()), Cell::One],
        ])
        .unwrap();
        assert_eq!(
            wick_expectation(&c2, &[2, 2], 24).unwrap(),
            MultiPoly::parse(c2.ring(), "3*a^2 + 1").unwrap()
        );
        assert!(wick_expectation(&c2, &[2, 1], 24).unwrap().is_zero());
        assert!(matches!(wick_expectation(&c2, &[20, 6], 24), Err(Error::Resource(_))));
    }

    #[test]
    fn normalized_symbolic_factors() {
        let ring = Ring::new(["m"]).unwrap();
        assert_eq!(normalized_symbolic_gaussian_moment(&ring, 0).unwrap(), MultiPoly::one(&ring));
        assert_eq!(
            normalized_symbolic_gaussian_moment(&ring, 1).unwrap(),
            MultiPoly::parse(&ring, "2*m+1").unwrap()
        );
        assert_eq!(
            normalized_symbolic_gaussian_moment(&ring, 2).unwrap(),
            MultiPoly::parse(&ring, "(2*m+1)*(2*m+3)").unwrap()
        );
    }

    #[test]
    fn symbolic_requires_pure_row() {
        let c = Construction::from_cells(vec![
            vec![Cell::One, Cell::Var("a".into())],
            vec![Cell::Zero, Cell::One],
        ])
        .unwrap();
        let err = symbolic_moment(&c, &ev(&[1, 1]), &SymbolicExponent { coordinate: 0 });
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn symbolic_matches_concrete() {
        let c = Construction::from_cells(vec![
            vec![Cell::One, Cell::Zero],
            vec![Cell::Var("a".into()), Cell::One],
        ])
        .unwrap();
        let sym = symbolic_moment(&c, &ev(&[1, 2]), &SymbolicExponent { coordinate: 0 }).unwrap();
        for mstar in 1..=5u32 {
            let at = evaluate_symbolic_exponent(&sym, mstar).unwrap();
            let scaled = at.scale_int(&gaussian_even_moment(mstar));
            let concrete = moment_by_coefficient(&c.covariance(), &ev(&[mstar, 2])).unwrap();
            assert_eq!(scaled, concrete, "m = {mstar}");
        }
    }

    #[test]
    fn exponent_vector_validation() {
        assert!(ExponentVector::new(vec![]).is_err());
        assert!(ExponentVector::new(vec![1, 0]).is_err());
        assert_eq!(ev(&[4, 3, 2]).to_string(), "4,3,2");
    }

    #[test]
    fn describe_lists_rows() {
        let c = Construction::unit_lower_triangular(3);
        assert_eq!(c.describe(), "X1 = U1; X2 = x21*U1 + U2; X3 = x31*U1 + x32*U2 + U3");
    }
}
