//! Monomial basis selection: half Newton polytope, diagonal pruning and
//! sign-symmetry blocks.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactmath::{Monomial, MultiPoly, Ring};

/// Candidate half-degree support for a Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBasis {
    pub ring: Ring,
    /// Graded-lex ascending, no duplicates.
    pub monomials: Vec<Monomial>,
    /// Sign-symmetry class of each monomial. Gram entries between different
    /// classes can be taken to be zero.
    pub blocks: Vec<usize>,
    /// True when every SOS decomposition of the target can be written over this
    /// basis, so an infeasible Gram system proves the target is not SOS.
    pub complete: bool,
}

impl GramBasis {
    /// Basis with a single block.
    pub fn new(ring: &Ring, mut monomials: Vec<Monomial>) -> Self {
        monomials.sort();
        monomials.dedup();
        let blocks = vec![0; monomials.len()];
        GramBasis { ring: ring.clone(), monomials, blocks, complete: false }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.blocks[i] == self.blocks[j]
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().collect::<BTreeSet<_>>().len()
    }
}

#[derive(Clone, Debug)]
pub struct BasisOptions {
    /// Keep only points of the half Newton polytope. When false the full
    /// basis of degree at most `deg(F)/2` is used.
    pub newton: bool,
    /// Drop monomials whose diagonal Gram entry is forced to zero.
    pub prune_diagonal: bool,
    pub sign_symmetry: bool,
}

impl Default for BasisOptions {
    fn default() -> Self {
        BasisOptions { newton: true, prune_diagonal: true, sign_symmetry: true }
    }
}

/// A reason why `f` cannot be a sum of squares, read off its degrees alone.
pub fn parity_obstruction(f: &MultiPoly) -> Option<String> {
    if f.is_zero() {
        return None;
    }
    let degrees: Vec<u32> = f.terms().map(|(m, _)| m.degree()).collect();
    let max = *degrees.iter().max().unwrap();
    let min = *degrees.iter().min().unwrap();
    if max % 2 == 1 {
        return Some(format!("odd total degree {max}"));
    }
    if min % 2 == 1 {
        return Some(format!("lowest-degree part has odd degree {min}"));
    }
    for (k, name) in f.ring().names().iter().enumerate() {
        let hi = f.terms().map(|(m, _)| m.exponents()[k]).max().unwrap();
        let lo = f.terms().map(|(m, _)| m.exponents()[k]).min().unwrap();
        if hi % 2 == 1 {
            return Some(format!("odd degree {hi} in {name}"));
        }
        if lo % 2 == 1 {
            return Some(format!("odd lowest degree {lo} in {name}"));
        }
    }
    None
}

/// Basis for a Gram representation of `f`.
///
/// The caller is expected to have rejected `f` with [`parity_obstruction`].
pub fn select_basis(f: &MultiPoly, opts: &BasisOptions) -> GramBasis {
    let ring = f.ring().clone();
    let nvars = ring.len();
    if f.is_zero() {
        return GramBasis { ring, monomials: Vec::new(), blocks: Vec::new(), complete: true };
    }
    let support: Vec<Vec<i64>> =
        f.terms().map(|(m, _)| m.exponents().iter().map(|&e| e as i64).collect()).collect();
    let max_deg = f.terms().map(|(m, _)| m.degree()).max().unwrap() / 2;
    let min_deg = if opts.newton { f.terms().map(|(m, _)| m.degree()).min().unwrap() / 2 } else { 0 };
    let (lo, hi): (Vec<u32>, Vec<u32>) = if opts.newton {
        (0..nvars)
            .map(|k| {
                let ex: Vec<u32> = f.terms().map(|(m, _)| m.exponents()[k]).collect();
                (ex.iter().min().unwrap().div_ceil(2), ex.iter().max().unwrap() / 2)
            })
            .unzip()
    } else {
        (vec![0; nvars], vec![max_deg; nvars])
    };

    let mut candidates = Vec::new();
    let mut current = vec![0u32; nvars];
    enumerate_box(&lo, &hi, 0, 0, min_deg, max_deg, &mut current, &mut candidates);

    let mut monomials: Vec<Monomial> = if opts.newton {
        let hull = Hull::new(&support);
        candidates
            .into_iter()
            .filter(|e| {
                let doubled: Vec<i64> = e.iter().map(|&x| 2 * x as i64).collect();
                hull.contains(&doubled)
            })
            .map(Monomial::new)
            .collect()
    } else {
        candidates.into_iter().map(Monomial::new).collect()
    };
    monomials.sort();

    if opts.prune_diagonal {
        let present: BTreeSet<Monomial> = f.terms().map(|(m, _)| m.clone()).collect();
        prune_diagonal(&mut monomials, &present);
    }

    let blocks = if opts.sign_symmetry {
        sign_blocks(&support, &monomials)
    } else {
        vec![0; monomials.len()]
    };
    GramBasis { ring, monomials, blocks, complete: true }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_box(
    lo: &[u32],
    hi: &[u32],
    k: usize,
    deg: u32,
    min_deg: u32,
    max_deg: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if k == lo.len() {
        if deg >= min_deg {
            out.push(current.clone());
        }
        return;
    }
    for e in lo[k]..=hi[k] {
        if deg + e > max_deg {
            break;
        }
        current[k] = e;
        enumerate_box(lo, hi, k + 1, deg + e, min_deg, max_deg, current, out);
    }
    current[k] = 0;
}

/// Removes `u` while `u²` is neither a term of `f` nor a product of two other
/// basis monomials: the coefficient of `u²` is then `G_uu` alone, so `G_uu = 0`
/// and the whole row vanishes in any PSD solution.
fn prune_diagonal(monomials: &mut Vec<Monomial>, present: &BTreeSet<Monomial>) {
    loop {
        let mut products: BTreeMap<Monomial, usize> = BTreeMap::new();
        for i in 0..monomials.len() {
            for j in i + 1..monomials.len() {
                *products.entry(monomials[i].mul(&monomials[j])).or_default() += 1;
            }
        }
        let before = monomials.len();
        monomials.retain(|u| {
            let sq = u.mul(u);
            present.contains(&sq) || products.contains_key(&sq)
        });
        if monomials.len() == before {
            break;
        }
    }
}

/// Groups monomials by their parity under every sign flip `x_k ↦ −x_k` (over a
/// subset of variables) that leaves the support of `f` invariant.
fn sign_blocks(support: &[Vec<i64>], monomials: &[Monomial]) -> Vec<usize> {
    let nvars = support.first().map_or(0, Vec::len);
    if nvars == 0 || nvars > 16 {
        return vec![0; monomials.len()];
    }
    let parity = |mask: u32, e: &mut dyn Iterator<Item = i64>| -> u32 {
        e.enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, x)| x as u32).sum::<u32>() % 2
    };
    let symmetries: Vec<u32> = (1u32..1 << nvars)
        .filter(|&mask| support.iter().all(|e| parity(mask, &mut e.iter().copied()) == 0))
        .collect();
    let mut ids: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let keys: Vec<Vec<u32>> = monomials
        .iter()
        .map(|m| {
            symmetries
                .iter()
                .map(|&s| parity(s, &mut m.exponents().iter().map(|&x| x as i64)))
                .collect()
        })
        .collect();
    for k in &keys {
        let next = ids.len();
        ids.entry(k.clone()).or_insert(next);
    }
    keys.iter().map(|k| ids[k]).collect()
}

/// Convex hull of a finite point set, queried by exact linear programming.
pub struct Hull {
    points: Vec<Vec<i64>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Hull {
    pub fn new(points: &[Vec<i64>]) -> Self {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        let dim = pts.first().map_or(0, Vec::len);
        let lo = (0..dim).map(|k| pts.iter().map(|p| p[k]).min().unwrap()).collect();
        let hi = (0..dim).map(|k| pts.iter().map(|p| p[k]).max().unwrap()).collect();
        Hull { points: pts, lo, hi }
    }

    /// Whether `target` is a convex combination of the points.
    pub fn contains(&self, target: &[i64]) -> bool {
        if self.points.is_empty() {
            return false;
        }
        if target.iter().zip(self.lo.iter().zip(&self.hi)).any(|(t, (l, h))| t < l || t > h) {
            return false;
        }
        if self.points.iter().any(|p| p.as_slice() == target) {
            return true;
        }
        let dim = target.len();
        // Rows: Σ λ_s p_s = target and Σ λ_s = 1.
        let rows: Vec<(Vec<BigRational>, BigRational)> = (0..=dim)
            .map(|r| {
                let coeffs = self
                    .points
                    .iter()
                    .map(|p| BigRational::from_integer(if r < dim { p[r].into() } else { 1.into() }))
                    .collect();
                let rhs = BigRational::from_integer(if r < dim { target[r].into() } else { 1.into() });
                (coeffs, rhs)
            })
            .collect();
        phase_one_feasible(rows)
    }
}

/// Feasibility of `{λ ≥ 0 : A λ = b}` by the phase-one simplex method with
/// Bland's rule, in exact arithmetic.
fn phase_one_feasible(rows: Vec<(Vec<BigRational>, BigRational)>) -> bool {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.0.len());
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for (i, (mut coeffs, mut rhs)) in rows.into_iter().enumerate() {
        if rhs.is_negative() {
            coeffs.iter_mut().for_each(|c| *c = -c.clone());
            rhs = -rhs;
        }
        let mut row = coeffs;
        row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
        row.push(rhs);
        tab.push(row);
    }
    // Objective: minimize the sum of artificials, stored as reduced costs.
    let mut obj = vec![BigRational::zero(); width];
    for row in &tab {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    while let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let inv = tab[r][enter].recip();
        for v in tab[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }
    obj[width - 1].is_zero()
}
