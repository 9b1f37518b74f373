//! Dense primal-dual interior-point solver for
//!
//! ```text
//! maximize t  subject to  ⟨A_i, G⟩ = b_i,  G − t·I ⪰ 0
//! ```
//!
//! written with `X = G − tI` as `min −t` s.t. `⟨A_i, X⟩ + tr(A_i)·t = b_i`,
//! `X ⪰ 0`, `t` free. The dual is `min b·u` s.t. `Σ u_i A_i ⪰ 0`,
//! `Σ u_i tr(A_i) = 1`; a dual point with `b·u < 0` proves that no PSD `G`
//! satisfies the constraints.
//!
//! Search directions are HKM with a Mehrotra predictor-corrector from an
//! infeasible start.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Symmetric matrix stored as its upper-triangle entries `(i, j, v)`, `i ≤ j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSparse {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymSparse {
    pub fn new(dim: usize) -> Self {
        SymSparse { dim, entries: Vec::new() }
    }

    /// Adds `v` at `(i, j)` and `(j, i)`.
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.dim, "entry ({i},{j}) outside a {0}x{0} matrix", self.dim);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut a = SymSparse::new(dim);
        for i in 0..dim {
            a.push(i, i, 1.0);
        }
        a
    }

    /// Upper triangle of a dense matrix, which must be symmetric.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Structural("constraint matrix is not square".into()));
        }
        let mut a = SymSparse::new(n);
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()) {
                    return Err(Error::Structural(format!("constraint matrix not symmetric at ({i},{j})")));
                }
                a.push(i, j, m[(i, j)]);
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    /// `⟨A, X⟩ = Σ_ij A_ij X_ij`.
    pub fn inner(&self, x: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * x[(i, i)] } else { v * (x[(i, j)] + x[(j, i)]) })
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum()
    }

    fn add_scaled_to(&self, alpha: f64, out: &mut DMatrix<f64>) {
        for &(i, j, v) in &self.entries {
            out[(i, j)] += alpha * v;
            if i != j {
                out[(j, i)] += alpha * v;
            }
        }
    }

    /// Entries of the full matrix, both orientations of off-diagonals.
    fn expanded(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(2 * self.entries.len());
        for &(i, j, v) in &self.entries {
            out.push((i, j, v));
            if i != j {
                out.push((j, i, v));
            }
        }
        out
    }

    fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v }).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub dim: usize,
    pub constraints: Vec<(SymSparse, f64)>,
}

impl SdpProblem {
    pub fn new(dim: usize) -> Self {
        SdpProblem { dim, constraints: Vec::new() }
    }

    pub fn add_constraint(&mut self, a: SymSparse, b: f64) {
        assert_eq!(a.dim(), self.dim, "constraint dimension mismatch");
        self.constraints.push((a, b));
    }
}

#[derive(Clone, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
    pub max_dim: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-9, max_iterations: 200, step_fraction: 0.98, max_dim: 400 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    NearOptimal,
    /// The best margin is negative: no PSD `G` meets the constraints.
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub g: DMatrix<f64>,
    /// Achieved margin `λ_min(G) ≥ t`.
    pub t: f64,
    pub primal_residual: f64,
    pub duality_gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Dual point `u`, one entry per input constraint (zero for dropped rows):
    /// `Σ u_i A_i ⪰ 0` and `b·u ≈ t`.
    pub dual: Vec<f64>,
    /// Constraints removed as linearly dependent on earlier ones.
    pub dropped_constraints: usize,
}

/// Keeps a maximal independent prefix-greedy subset of the constraints.
/// Returns kept indices, or `None` when a dropped row contradicts the kept ones.
fn independent_rows(p: &SdpProblem) -> Option<(Vec<usize>, DMatrix<f64>)> {
    let m = p.constraints.len();
    // Constraint Gram matrix ⟨A_i, A_j⟩, accumulated per matrix position.
    let mut by_position: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for (k, (a, _)) in p.constraints.iter().enumerate() {
        for &(i, j, v) in a.entries() {
            by_position.entry((i, j)).or_default().push((k, v));
        }
    }
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for ((i, j), list) in &by_position {
        let weight = if i == j { 1.0 } else { 2.0 };
        for &(r, u) in list {
            for &(c, v) in list {
                gram[(r, c)] += weight * u * v;
            }
        }
    }
    // Pivoted Gram-Schmidt on the constraint Gram matrix.
    let mut kept: Vec<usize> = Vec::new();
    let mut basis: Vec<DVector<f64>> = Vec::new(); // coefficients of orthonormal vectors in kept rows
    for i in 0..m {
        let norm_sq = gram[(i, i)];
        let mut proj = Vec::with_capacity(basis.len());
        let mut resid = norm_sq;
        for q in &basis {
            let dot: f64 = kept.iter().enumerate().map(|(k, &r)| q[k] * gram[(r, i)]).sum();
            proj.push(dot);
            resid -= dot * dot;
        }
        if resid > 1e-10 * norm_sq.max(1e-300) && norm_sq > 0.0 {
            let scale = resid.sqrt();
            let mut coeffs = DVector::zeros(kept.len() + 1);
            coeffs[kept.len()] = 1.0 / scale;
            for (q, d) in basis.iter().zip(&proj) {
                for k in 0..q.len() {
                    coeffs[k] -= d * q[k] / scale;
                }
            }
            for q in basis.iter_mut() {
                let mut grown = DVector::zeros(kept.len() + 1);
                grown.rows_mut(0, q.len()).copy_from(q);
                *q = grown;
            }
            basis.push(coeffs);
            kept.push(i);
        } else {
            // Dependent: b_i must match the combination of kept rows.
            let b_i = p.constraints[i].1;
            let mut predicted = 0.0;
            for (q, d) in basis.iter().zip(&proj) {
                let qb: f64 = kept.iter().enumerate().map(|(k, &r)| q[k] * p.constraints[r].1).sum();
                predicted += d * qb;
            }
            if (predicted - b_i).abs() > 1e-7 * (1.0 + b_i.abs()) {
                return None;
            }
        }
    }
    let k = kept.len();
    let kept_gram = DMatrix::from_fn(k, k, |a, b| gram[(kept[a], kept[b])]);
    Some((kept, kept_gram))
}

fn sym(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest `α` with `X + α ΔX ⪰ 0`, given the Cholesky factor of `X`.
fn max_step(chol: &Cholesky<f64, nalgebra::Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let linv = match l.clone().try_inverse() {
        Some(v) => v,
        None => return 0.0,
    };
    let mut s = &linv * dx * linv.transpose();
    sym(&mut s);
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

struct Workspace {
    a: Vec<SymSparse>,
    expanded: Vec<Vec<(usize, usize, f64)>>,
    b: DVector<f64>,
    tr: DVector<f64>,
    n: usize,
}

impl Workspace {
    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.inner(x)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (a, &yi) in self.a.iter().zip(y.iter()) {
            a.add_scaled_to(yi, &mut out);
        }
        out
    }

    /// `M_ij = tr(A_i X A_j W)`.
    fn schur(&self, x: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.a.len();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for &(p, q, v) in &self.expanded[i] {
                    for &(r, t, u) in &self.expanded[j] {
                        s += v * u * x[(q, r)] * w[(t, p)];
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = p.dim;
    if n > opts.max_dim {
        return Err(Error::Resource(format!("Gram dimension {n} exceeds the cap of {}", opts.max_dim)));
    }
    if p.constraints.iter().any(|(a, _)| a.dim() != n) {
        return Err(Error::Structural("constraint dimension mismatch".into()));
    }
    let total = p.constraints.len();
    let Some((kept, kept_gram)) = independent_rows(p) else {
        return Ok(SdpSolution {
            g: DMatrix::zeros(n, n),
            t: f64::NEG_INFINITY,
            primal_residual: f64::INFINITY,
            duality_gap: f64::INFINITY,
            status: SdpStatus::Infeasible,
            iterations: 0,
            dual: vec![0.0; total],
            dropped_constraints: total,
        });
    };
    let dropped = total - kept.len();
    // Rows are normalized to unit Frobenius norm, which makes the iteration
    // invariant under rescaling of individual constraints.
    let row_norm: Vec<f64> = kept.iter().map(|&i| p.constraints[i].0.frobenius_sq().sqrt()).collect();
    let normalized: Vec<SymSparse> = kept
        .iter()
        .zip(&row_norm)
        .map(|(&i, &nrm)| {
            let a = &p.constraints[i].0;
            SymSparse { dim: a.dim, entries: a.entries.iter().map(|&(r, c, v)| (r, c, v / nrm)).collect() }
        })
        .collect();
    let kept_gram = DMatrix::from_fn(kept.len(), kept.len(), |a, b| kept_gram[(a, b)] / (row_norm[a] * row_norm[b]));
    let ws = Workspace {
        expanded: normalized.iter().map(SymSparse::expanded).collect(),
        b: DVector::from_iterator(kept.len(), kept.iter().zip(&row_norm).map(|(&i, nrm)| p.constraints[i].1 / nrm)),
        tr: DVector::from_iterator(kept.len(), normalized.iter().map(SymSparse::trace)),
        a: normalized,
        n,
    };
    let m = ws.a.len();

    if n == 0 {
        return Ok(SdpSolution {
            g: DMatrix::zeros(0, 0),
            t: 0.0,
            primal_residual: ws.b.amax(),
            duality_gap: 0.0,
            status: if ws.b.amax() <= opts.tol { SdpStatus::Optimal } else { SdpStatus::Infeasible },
            iterations: 0,
            dual: vec![0.0; total],
            dropped_constraints: dropped,
        });
    }
    if ws.tr.amax() == 0.0 {
        // No constraint sees the trace, so t is unbounded.
        return Err(Error::Structural("margin unbounded: no constraint involves the identity direction".into()));
    }

    let nf = n as f64;
    let b_norm = ws.b.norm();
    let a_norms: Vec<f64> = ws.a.iter().map(|a| a.frobenius_sq().sqrt()).collect();
    // Scale-invariant start: multiplying every (A_i, b_i) by k leaves X, Z unchanged.
    let mut xi = 10f64.max(nf.sqrt());
    for (k, an) in a_norms.iter().enumerate() {
        if *an > 0.0 {
            xi = xi.max(nf * ws.b[k].abs() / an);
        }
    }
    let eta = 10f64.max(nf.sqrt());
    let mut x = DMatrix::<f64>::identity(n, n) * xi;
    let mut z = DMatrix::<f64>::identity(n, n) * eta;
    let mut y = DVector::<f64>::zeros(m);
    let mut t = 0.0f64;

    let mut status = SdpStatus::NumericalFailure;
    let mut iterations = 0;
    let mut best: Option<(f64, DMatrix<f64>, f64, DVector<f64>)> = None;
    let mut last_gap = f64::INFINITY;

    for iter in 0..opts.max_iterations {
        iterations = iter;
        // Residuals.
        let rp = &ws.b - ws.apply(&x) - &ws.tr * t;
        let mut rd = -&z - ws.adjoint(&y);
        sym(&mut rd);
        let rf = -1.0 - ws.tr.dot(&y);
        let mu = x.dot(&z) / nf;
        let pobj = -t;
        let dobj = ws.b.dot(&y);
        let rel_p = rp.norm() / (1.0 + b_norm);
        let rel_d = (rd.norm() + rf.abs()) / (1.0 + 1.0);
        let rel_gap = (x.dot(&z)).abs() / (1.0 + pobj.abs() + dobj.abs());
        last_gap = rel_gap;
        let merit = rel_p.max(rel_d).max(rel_gap);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), t, y.clone()));
        }
        // Primal feasibility is restored exactly by the final polish.
        if rel_p <= opts.tol.sqrt() && rel_d <= opts.tol && rel_gap <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }

        let Some(zchol) = Cholesky::new(z.clone()) else { break };
        let Some(xchol) = Cholesky::new(x.clone()) else { break };
        let zinv = {
            let mut v = zchol.inverse();
            sym(&mut v);
            v
        };
        let schur = ws.schur(&x, &zinv);
        let Some(mchol) = Cholesky::new(schur.clone()).or_else(|| {
            let mut reg = schur.clone();
            let shift = 1e-14 * schur.diagonal().amax().max(1.0);
            for i in 0..m {
                reg[(i, i)] += shift;
            }
            Cholesky::new(reg)
        }) else {
            break;
        };
        let minv_tr = mchol.solve(&ws.tr);
        let denom = ws.tr.dot(&minv_tr);

        // Solves for (ΔX, Δt, Δy, ΔZ) with complementarity target K.
        let direction = |k: &DMatrix<f64>| -> (DMatrix<f64>, f64, DVector<f64>, DMatrix<f64>) {
            let kz = k * &zinv;
            let xrz = &x * &rd * &zinv;
            let h = &rp - ws.apply(&kz) + ws.apply(&xrz);
            let minv_h = mchol.solve(&h);
            let dt = (ws.tr.dot(&minv_h) - rf) / denom;
            let dy = &minv_h - &minv_tr * dt;
            let mut dz = &rd - ws.adjoint(&dy);
            sym(&mut dz);
            let mut dx = &kz - &x * &dz * &zinv;
            sym(&mut dx);
            (dx, dt, dy, dz)
        };

        // Predictor.
        let xz = &x * &z;
        let k_aff = -&xz;
        let (dxa, _, _, dza) = direction(&k_aff);
        let ap = max_step(&xchol, &dxa).min(1.0);
        let ad = max_step(&zchol, &dza).min(1.0);
        let mu_aff = (&x + &dxa * ap).dot(&(&z + &dza * ad)) / nf;
        let sigma = ((mu_aff / mu).max(0.0)).powi(3).min(1.0);

        // Corrector.
        let k = DMatrix::<f64>::identity(n, n) * (sigma * mu) - &xz - &dxa * &dza;
        let (dx, dt, dy, dz) = direction(&k);
        let ap = (opts.step_fraction * max_step(&xchol, &dx)).min(1.0);
        let ad = (opts.step_fraction * max_step(&zchol, &dz)).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) || (ap < 1e-12 && ad < 1e-12) {
            break;
        }
        x += &dx * ap;
        t += dt * ap;
        y += &dy * ad;
        z += &dz * ad;
        sym(&mut x);
        sym(&mut z);
        iterations = iter + 1;
    }

    if status != SdpStatus::Optimal {
        if let Some((merit, bx, bt, by)) = best {
            x = bx;
            t = bt;
            y = by;
            if merit <= opts.tol.sqrt() {
                status = SdpStatus::NearOptimal;
            }
        }
    }

    let mut g = &x + DMatrix::<f64>::identity(n, n) * t;
    sym(&mut g);
    // Polish: least-squares projection of G onto {⟨A_i, G⟩ = b_i}.
    let scale = 1.0 + ws.b.amax();
    if let Some(kchol) = Cholesky::new(kept_gram) {
        let r = &ws.b - ws.apply(&g);
        let c = kchol.solve(&r);
        g += ws.adjoint(&c);
        sym(&mut g);
    }
    let primal_residual = (&ws.b - ws.apply(&g)).amax();
    let margin = min_eigenvalue(&g);
    if status == SdpStatus::Optimal && primal_residual > opts.tol * scale {
        status = SdpStatus::NearOptimal;
    }
    if matches!(status, SdpStatus::Optimal | SdpStatus::NearOptimal) && margin < -1e3 * opts.tol * scale {
        status = SdpStatus::Infeasible;
    }
    let mut dual = vec![0.0; total];
    for (k, &i) in kept.iter().enumerate() {
        dual[i] = -y[k] / row_norm[k];
    }
    Ok(SdpSolution {
        g,
        t: margin,
        primal_residual,
        duality_gap: last_gap,
        status,
        iterations,
        dual,
        dropped_constraints: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_pin(n: usize, values: &[f64]) -> SdpProblem {
        let mut p = SdpProblem::new(n);
        for i in 0..n {
            for j in i..n {
                let mut a = SymSparse::new(n);
                a.push(i, j, 1.0);
                let b = if i == j { values[i] } else { 0.0 };
                p.add_constraint(a, b);
            }
        }
        p
    }

    #[test]
    fn pinned_identity() {
        let s = solve(&diag_pin(2, &[1.0, 1.0]), &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.t - 1.0).abs() < 1e-7, "t = {}", s.t);
        assert!((s.g[(0, 0)] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn one_by_one() {
        let mut p = SdpProblem::new(1);
        p.add_constraint(SymSparse::identity(1), 2.0);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.g[(0, 0)] - 2.0).abs() < 1e-8);
        assert!((s.t - 2.0).abs() < 1e-7);
    }

    #[test]
    fn negative_square_is_infeasible() {
        let mut p = SdpProblem::new(1);
        p.add_constraint(SymSparse::identity(1), -1.0);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Infeasible);
        assert!(s.t < 0.0);
        // Dual point: u·A ⪰ 0 and b·u < 0.
        assert!(s.dual[0] > 0.0);
        assert!(-s.dual[0] < 0.0);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        let mut p = diag_pin(2, &[3.0, 1.0]);
        p.add_constraint(SymSparse::identity(2), 4.0);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.dropped_constraints, 1);
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.t - 1.0).abs() < 1e-7);

        let mut bad = diag_pin(2, &[3.0, 1.0]);
        bad.add_constraint(SymSparse::identity(2), 5.0);
        assert_eq!(solve(&bad, &SdpOptions::default()).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn dimension_cap() {
        let p = SdpProblem::new(3);
        let opts = SdpOptions { max_dim: 2, ..SdpOptions::default() };
        assert!(matches!(solve(&p, &opts), Err(Error::Resource(_))));
    }
}
