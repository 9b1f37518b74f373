use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::basis::GramBasis;
use crate::error::{Error, Result};
use crate::exactmath::{rational, Monomial, MultiPoly, RationalMatrix};
use crate::sdp::{SdpProblem, SymSparse};

/// Linear constraints on `G` expressing `zᵀ G z = F`.
#[derive(Clone, Debug)]
pub struct GramSystem {
    pub basis: GramBasis,
    /// Every product `z_i z_j`, `i ≤ j`, with the pairs producing it.
    pub pairs: BTreeMap<Monomial, Vec<(usize, usize)>>,
    /// Coefficient of `F` at each product monomial (absent means zero).
    pub rhs: BTreeMap<Monomial, BigRational>,
}

impl GramSystem {
    pub fn rhs_of(&self, mu: &Monomial) -> BigRational {
        self.rhs.get(mu).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Whether `G` satisfies every constraint exactly.
    pub fn is_satisfied_by(&self, g: &RationalMatrix) -> bool {
        g.rows() == self.basis.len()
            && g.is_symmetric()
            && self.pairs.iter().all(|(mu, list)| {
                let s: BigRational = list
                    .iter()
                    .map(|&(i, j)| if i == j { g.get(i, i).clone() } else { g.get(i, j) * BigRational::from_integer(2.into()) })
                    .sum();
                s == self.rhs_of(mu)
            })
    }

    /// Pairs allowed by the sign-symmetry blocks of the basis.
    pub fn block_pairs<'a>(&'a self, list: &'a [(usize, usize)]) -> impl Iterator<Item = (usize, usize)> + 'a {
        list.iter().copied().filter(|&(i, j)| self.basis.same_block(i, j))
    }

    /// Floating-point SDP over block-diagonal `G`, one constraint per product
    /// monomial that some in-block pair produces. Returns the problem and the
    /// product monomial of each constraint.
    pub fn to_sdp(&self) -> (SdpProblem, Vec<Monomial>) {
        let n = self.basis.len();
        let mut problem = SdpProblem::new(n);
        let mut order = Vec::new();
        for (mu, list) in &self.pairs {
            let mut a = SymSparse::new(n);
            for (i, j) in self.block_pairs(list) {
                a.push(i, j, 1.0);
            }
            if a.entries().is_empty() {
                continue;
            }
            problem.add_constraint(a, rational::to_f64(&self.rhs_of(mu)));
            order.push(mu.clone());
        }
        (problem, order)
    }
}

/// Exact constraint system for `F` over `basis`.
pub fn build_gram_system(f: &MultiPoly, basis: &GramBasis) -> Result<GramSystem> {
    if f.ring() != &basis.ring {
        return Err(Error::Structural(format!(
            "basis ring {:?} differs from polynomial ring {:?}",
            basis.ring,
            f.ring()
        )));
    }
    let z = &basis.monomials;
    let mut pairs: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..z.len() {
        for j in i..z.len() {
            pairs.entry(z[i].mul(&z[j])).or_default().push((i, j));
        }
    }
    let mut rhs = BTreeMap::new();
    for (m, c) in f.terms() {
        if !pairs.contains_key(m) {
            return Err(Error::BasisInsufficient(m.display_with(f.ring().names()).to_string()));
        }
        rhs.insert(m.clone(), c.clone());
    }
    Ok(GramSystem { basis: basis.clone(), pairs, rhs })
}
