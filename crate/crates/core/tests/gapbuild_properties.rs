use std::collections::BTreeMap;

use gpisos::exactmath::{rat, BigRational};
use gpisos::gapbuild::{
    build_gap, build_gap_symbolic, enumerate_cases, enumerate_subproblems, specialize_symbolic,
};
use gpisos::{ExponentVector, MultiPoly, Subproblem};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ev(m: &[u32]) -> ExponentVector {
    ExponentVector::new(m.to_vec()).unwrap()
}

#[test]
fn symbolic_gap_specializes_to_concrete_gap() {
    for (pattern, n) in [(vec![1, 3, 2], 3), (vec![1, 1, 1, 1], 4)] {
        for c in enumerate_cases(n).unwrap() {
            let sym = build_gap_symbolic(&ev(&pattern), &c).unwrap();
            for mstar in 1..=6u32 {
                let mut m = pattern.clone();
                m[0] = mstar;
                let concrete = build_gap(&ev(&m), &c).unwrap().poly;
                let special = specialize_symbolic(&sym, mstar).unwrap();
                assert_eq!(special.embed(concrete.ring()).unwrap(), concrete, "{pattern:?} m*={mstar}");
            }
        }
    }
}

fn nonnegative_at_random_points(f: &MultiPoly, seed: u64, count: usize) -> Option<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let x: Vec<BigRational> =
            (0..f.ring().len()).map(|_| rat(rng.gen_range(-40..=40), rng.gen_range(1..=8))).collect();
        if f.evaluate(&x).unwrap().is_negative() {
            return Some(x);
        }
    }
    None
}

#[test]
fn generated_gaps_are_nonnegative_at_1000_points() {
    let mut targets = vec![build_gap(&ev(&[4, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly];
    for c in enumerate_cases(4).unwrap() {
        targets.push(build_gap(&ev(&[2, 1, 1, 1]), &c).unwrap().poly);
        targets.push(build_gap_symbolic(&ev(&[1, 1, 1, 1]), &c).unwrap().poly);
    }
    targets.push(build_gap_symbolic(&ev(&[1, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly);
    for (i, f) in targets.iter().enumerate() {
        assert_eq!(nonnegative_at_random_points(f, i as u64, 1000), None, "target {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn small_gaps_are_nonnegative(m in prop::collection::vec(1u32..=2, 2..=4), seed in any::<u64>()) {
        let cases = enumerate_cases(m.len()).unwrap();
        let c = &cases[(seed % cases.len() as u64) as usize];
        let f = build_gap(&ev(&m), c).unwrap().poly;
        prop_assert_eq!(nonnegative_at_random_points(&f, seed, 200), None);
    }

    #[test]
    fn subproblems_cover_every_k_once_per_case(m in prop::collection::vec(1u32..=4, 2..=5)) {
        let subs = enumerate_subproblems(&ev(&m), None).unwrap();
        let top = *m.last().unwrap();
        let ncases = enumerate_cases(m.len()).unwrap().len();
        let mut seen: BTreeMap<(usize, u32), usize> = BTreeMap::new();
        let mut recursive = 0;
        for s in &subs {
            match s {
                Subproblem::Instance { instance, strict_required } => {
                    let k = instance.reduction_k.unwrap();
                    prop_assert_eq!(*strict_required, k == top && m.len() >= 3);
                    prop_assert_eq!(instance.exponents.as_slice().last().copied(), Some(k));
                    *seen.entry((instance.case_id.unwrap(), k)).or_default() += 1;
                }
                Subproblem::Recursive(lower) => {
                    recursive += 1;
                    prop_assert_eq!(lower.as_slice(), &m[..m.len() - 1]);
                }
            }
        }
        prop_assert_eq!(seen.len(), ncases * top as usize);
        prop_assert!(seen.values().all(|&v| v == 1));
        prop_assert_eq!(recursive, usize::from(m.len() >= 3));
    }
}
