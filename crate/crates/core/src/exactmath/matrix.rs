use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{structural, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(structural!("ragged rows in matrix literal"));
        }
        Ok(RationalMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(structural!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        if x.len() != self.cols {
            return Err(structural!("vector of length {} against {} columns", x.len(), self.cols));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[BigRational]) -> Result<BigRational> {
        let ax = self.mul_vec(x)?;
        Ok(ax.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    /// Symmetric permutation `Pᵀ A P` where column `k` of `P` is `e_{perm[k]}`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> RationalMatrix {
        let n = perm.len();
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(perm[i], perm[j]).clone());
            }
        }
        out
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    Indefinite,
}

/// Result of a symmetric-pivoted `LDLᵀ` factorization.
#[derive(Clone, Debug)]
pub struct Ldlt {
    /// `perm[k]` is the original index placed at position `k`.
    pub perm: Vec<usize>,
    pub l: RationalMatrix,
    pub d: Vec<BigRational>,
    pub verdict: PsdVerdict,
    /// False when elimination stopped at a zero pivot whose row still had
    /// nonzero entries; `l` and `d` then only cover the first `d.len()` steps.
    pub complete: bool,
}

impl Ldlt {
    /// `L · diag(d) · Lᵀ`, for checking reconstruction.
    pub fn reconstruct(&self) -> RationalMatrix {
        let n = self.l.rows();
        let mut out = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = BigRational::zero();
                for (k, dk) in self.d.iter().enumerate().take(j + 1) {
                    if dk.is_zero() {
                        continue;
                    }
                    let a = self.l.get(i, k);
                    let b = self.l.get(j, k);
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b * dk;
                    }
                }
                out.set(i, j, s.clone());
                out.set(j, i, s);
            }
        }
        out
    }
}

/// Exact `PᵀAP = L·diag(d)·Lᵀ` with diagonal pivoting on the entry of largest
/// magnitude among the remaining diagonal (ties broken by lowest index).
///
/// The verdict is PSD iff every pivot is non-negative and elimination never
/// meets a zero pivot whose remaining row/column still holds a nonzero entry.
pub fn ldlt(a: &RationalMatrix) -> Result<Ldlt> {
    if !a.is_symmetric() {
        return Err(structural!("ldlt requires a symmetric matrix"));
    }
    let n = a.rows();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = RationalMatrix::identity(n);
    let mut d = Vec::with_capacity(n);
    let mut verdict = PsdVerdict::Psd;

    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if w.get(i, i).abs() > w.get(p, p).abs() {
                p = i;
            }
        }
        if p != k {
            swap_symmetric(&mut w, k, p);
            perm.swap(k, p);
            for j in 0..k {
                let tmp = l.get(k, j).clone();
                l.set(k, j, l.get(p, j).clone());
                l.set(p, j, tmp);
            }
        }
        let pivot = w.get(k, k).clone();
        if pivot.is_zero() {
            // Every remaining diagonal entry is zero.
            let residual = (k..n).any(|i| (k..n).any(|j| !w.get(i, j).is_zero()));
            if residual {
                return Ok(Ldlt { perm, l, d, verdict: PsdVerdict::Indefinite, complete: false });
            }
            d.extend(std::iter::repeat_with(BigRational::zero).take(n - k));
            return Ok(Ldlt { perm, l, d, verdict, complete: true });
        }
        if pivot.is_negative() {
            verdict = PsdVerdict::Indefinite;
        }
        let inv = pivot.recip();
        for i in k + 1..n {
            let wik = w.get(i, k).clone();
            if wik.is_zero() {
                continue;
            }
            let lik = &wik * &inv;
            for j in k + 1..=i {
                let wjk = w.get(j, k);
                if wjk.is_zero() {
                    continue;
                }
                let updated = w.get(i, j) - &lik * wjk;
                w.set(i, j, updated);
            }
            l.set(i, k, lik);
        }
        // Mirror the updated lower triangle.
        for i in k + 1..n {
            for j in k + 1..i {
                let v = w.get(i, j).clone();
                w.set(j, i, v);
            }
            w.set(i, k, BigRational::zero());
            w.set(k, i, BigRational::zero());
        }
        d.push(pivot);
    }
    Ok(Ldlt { perm, l, d, verdict, complete: true })
}

fn swap_symmetric(w: &mut RationalMatrix, a: usize, b: usize) {
    let n = w.rows();
    for j in 0..n {
        let tmp = w.get(a, j).clone();
        w.set(a, j, w.get(b, j).clone());
        w.set(b, j, tmp);
    }
    for i in 0..n {
        let tmp = w.get(i, a).clone();
        w.set(i, a, w.get(i, b).clone());
        w.set(i, b, tmp);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Solution(Vec<BigRational>),
    Inconsistent,
}

/// Exact solution of `A x = b`; the minimum-Euclidean-norm one when the
/// system is underdetermined.
///
/// Computed as `x = Aᵀ λ` for any `λ` solving `(A Aᵀ) λ = b`: that system is
/// consistent exactly when `A x = b` is, and `Aᵀλ` does not depend on which
/// solution `λ` is taken.
pub fn solve_linear(a: &RationalMatrix, b: &[BigRational]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(structural!("right-hand side has {} entries for {} rows", b.len(), a.rows()));
    }
    let at = a.transpose();
    let gram = a.mul(&at)?;
    match gauss_solve(&gram, b) {
        None => Ok(LinearSolution::Inconsistent),
        Some(lambda) => Ok(LinearSolution::Solution(at.mul_vec(&lambda)?)),
    }
}

/// Gauss–Jordan elimination returning one solution (free variables zero) or
/// `None` when inconsistent.
fn gauss_solve(m: &RationalMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut aug: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for v in aug[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=cols {
                    let delta = &f * &aug[r][j];
                    aug[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][cols].clone();
    }
    Some(x)
}
