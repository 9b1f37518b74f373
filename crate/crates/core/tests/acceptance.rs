//! Acceptance gate: every criterion at its stated tolerance, one line each.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gpisos::certfmt::{emit, parse, CertificateFile, Metadata};
use gpisos::exactmath::{ldlt, rat, BigRational, Monomial, MultiPoly, RationalMatrix, Ring};
use gpisos::gapbuild::{build_gap, build_gap_symbolic, build_instance, enumerate_cases, specialize_symbolic};
use gpisos::moments::oracle::{run_oracle, OracleConfig};
use gpisos::soscert::{
    build_gram_system, check_strictness, extract_sos, round_and_project, select_basis, BasisOptions, GramBasis,
};
use gpisos::{certify, verify_certificate, CertifyError, CertifyOptions, ExponentVector, GapInstance, StrictnessVerdict};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F432: &str = "94500 + 1474200*a^2 + 2324700*a^4 + 400680*a^6 + 2381400*a*b + 12474000*a^3*b + 9729720*a^5*b + 585900*b^2 + 14004900*a^2*b^2 + 36458100*a^4*b^2 + 12152700*a^6*b^2 + 3742200*a*b^3 + 32432400*a^3*b^3 + 48648600*a^5*b^3 + 151200*b^4 + 6066900*a^2*b^4 + 30391200*a^4*b^4 + 34454700*a^6*b^4";
const F2111_CASE1: &str = "6 + 42*a^2 + 12*b^2 + 102*a^2*b^2 + 60*a*b*c + 6*c^2 + 12*a^2*c^2 + 60*b*d + 420*a^2*b*d + 120*a*c*d + 12*d^2 + 102*a^2*d^2 + 102*b^2*d^2 + 942*a^2*b^2*d^2 + 420*a*b*c*d^2 + 42*c^2*d^2 + 102*a^2*c^2*d^2 + 120*a*b*e + 36*c*e + 60*a^2*c*e + 60*a*d*e + 420*a*b^2*d*e + 180*b*c*d*e + 420*a^2*b*c*d*e + 180*a*c^2*d*e + 6*e^2 + 12*a^2*e^2 + 42*b^2*e^2 + 102*a^2*b^2*e^2 + 180*a*b*c*e^2 + 42*c^2*e^2 + 42*a^2*c^2*e^2";
const F2111_CASE2: &str = "6 + 12*a^2 + 60*a*b + 12*b^2 + 102*a^2*b^2 + 42*c^2 + 102*a^2*c^2 + 420*a*b*c^2 + 102*b^2*c^2 + 942*a^2*b^2*c^2 + 180*a*c*d + 180*b*c*d + 420*a^2*b*c*d + 420*a*b^2*c*d + 42*d^2 + 42*a^2*d^2 + 180*a*b*d^2 + 42*b^2*d^2 + 102*a^2*b^2*d^2";
const F2111_CASE3: &str = "42 + 42*a^2 + 180*a*b + 42*b^2 + 102*a^2*b^2 + 180*a*c + 180*b*c + 420*a^2*b*c + 420*a*b^2*c + 42*c^2 + 102*a^2*c^2 + 420*a*b*c^2 + 102*b^2*c^2 + 942*a^2*b^2*c^2";
const FM32: &str = "450 + 2295*a^2 + 1620*a^4 + 135*a^6 + 3780*a*b + 9000*a^3*b + 3780*a^5*b + 900*b^2 + 9990*a^2*b^2 + 14040*a^4*b^2 + 2790*a^6*b^2 + 2700*a*b^3 + 12600*a^3*b^3 + 11340*a^5*b^3 + 90*b^4 + 2295*a^2*b^4 + 7020*a^4*b^4 + 5175*a^6*b^4 + 1575*a^2*p^2 + 1800*a^4*p^2 + 213*a^6*p^2 + 2520*a*b*p^2 + 9600*a^3*b*p^2 + 5112*a^5*b*p^2 + 630*b^2*p^2 + 10800*a^2*b^2*p^2 + 19170*a^4*b^2*p^2 + 4464*a^6*b^2*p^2 + 2880*a*b^3*p^2 + 17040*a^3*b^3*p^2 + 17856*a^5*b^3*p^2 + 120*b^4*p^2 + 3195*a^2*b^4*p^2 + 11160*a^4*b^4*p^2 + 9129*a^6*b^4*p^2 + 450*a^4*p^4 + 90*a^6*p^4 + 2400*a^3*b*p^4 + 2160*a^5*b*p^4 + 2700*a^2*b^2*p^4 + 8100*a^4*b^2*p^4 + 2472*a^6*b^2*p^4 + 720*a*b^3*p^4 + 7200*a^3*b^3*p^4 + 9888*a^5*b^3*p^4 + 30*b^4*p^4 + 1350*a^2*b^4*p^4 + 6180*a^4*b^4*p^4 + 6020*a^6*b^4*p^4 + 12*a^6*p^6 + 288*a^5*b*p^6 + 1080*a^4*b^2*p^6 + 576*a^6*b^2*p^6 + 960*a^3*b^3*p^6 + 2304*a^5*b^3*p^6 + 180*a^2*b^4*p^6 + 1440*a^4*b^4*p^6 + 1880*a^6*b^4*p^6 + 48*a^6*b^2*p^8 + 192*a^5*b^3*p^8 + 120*a^4*b^4*p^8 + 280*a^6*b^4*p^8 + 16*a^6*b^4*p^10";
const FM111_CASE1: &str = "1 + 4*a^2 + b^2 + 7*a^2*b^2 + 6*a*b*c + c^2 + a^2*c^2 + 6*b*d + 30*a^2*b*d + 12*a*c*d + d^2 + 7*a^2*d^2 + 7*b^2*d^2 + 52*a^2*b^2*d^2 + 30*a*b*c*d^2 + 4*c^2*d^2 + 7*a^2*c^2*d^2 + 12*a*b*e + 6*c*e + 6*a^2*c*e + 6*a*d*e + 30*a*b^2*d*e + 18*b*c*d*e + 30*a^2*b*c*d*e + 18*a*c^2*d*e + e^2 + a^2*e^2 + 4*b^2*e^2 + 7*a^2*b^2*e^2 + 18*a*b*c*e^2 + 7*c^2*e^2 + 4*a^2*c^2*e^2 + 3*a^2*p^2 + b^2*p^2 + 8*a^2*b^2*p^2 + 4*a*b*c*p^2 + a^2*c^2*p^2 + 4*b*d*p^2 + 32*a^2*b*d*p^2 + 8*a*c*d*p^2 + d^2*p^2 + 8*a^2*d^2*p^2 + 8*b^2*d^2*p^2 + 71*a^2*b^2*d^2*p^2 + 32*a*b*c*d^2*p^2 + 3*c^2*d^2*p^2 + 8*a^2*c^2*d^2*p^2 + 8*a*b*e*p^2 + 4*a^2*c*e*p^2 + 4*a*d*e*p^2 + 32*a*b^2*d*e*p^2 + 12*b*c*d*e*p^2 + 32*a^2*b*c*d*e*p^2 + 12*a*c^2*d*e*p^2 + a^2*e^2*p^2 + 3*b^2*e^2*p^2 + 8*a^2*b^2*e^2*p^2 + 12*a*b*c*e^2*p^2 + 3*a^2*c^2*e^2*p^2 + 2*a^2*b^2*p^4 + 8*a^2*b*d*p^4 + 2*a^2*d^2*p^4 + 2*b^2*d^2*p^4 + 30*a^2*b^2*d^2*p^4 + 8*a*b*c*d^2*p^4 + 2*a^2*c^2*d^2*p^4 + 8*a*b^2*d*e*p^4 + 8*a^2*b*c*d*e*p^4 + 2*a^2*b^2*e^2*p^4 + 4*a^2*b^2*d^2*p^6";
const FM111_CASE2: &str = "1 + a^2 + 6*a*b + b^2 + 7*a^2*b^2 + 4*c^2 + 7*a^2*c^2 + 30*a*b*c^2 + 7*b^2*c^2 + 52*a^2*b^2*c^2 + 18*a*c*d + 18*b*c*d + 30*a^2*b*c*d + 30*a*b^2*c*d + 7*d^2 + 4*a^2*d^2 + 18*a*b*d^2 + 4*b^2*d^2 + 7*a^2*b^2*d^2 + a^2*p^2 + 4*a*b*p^2 + b^2*p^2 + 8*a^2*b^2*p^2 + 3*c^2*p^2 + 8*a^2*c^2*p^2 + 32*a*b*c^2*p^2 + 8*b^2*c^2*p^2 + 71*a^2*b^2*c^2*p^2 + 12*a*c*d*p^2 + 12*b*c*d*p^2 + 32*a^2*b*c*d*p^2 + 32*a*b^2*c*d*p^2 + 3*a^2*d^2*p^2 + 12*a*b*d^2*p^2 + 3*b^2*d^2*p^2 + 8*a^2*b^2*d^2*p^2 + 2*a^2*b^2*p^4 + 2*a^2*c^2*p^4 + 8*a*b*c^2*p^4 + 2*b^2*c^2*p^4 + 30*a^2*b^2*c^2*p^4 + 8*a^2*b*c*d*p^4 + 8*a*b^2*c*d*p^4 + 2*a^2*b^2*d^2*p^4 + 4*a^2*b^2*c^2*p^6";
const FM111_CASE3: &str = "7 + 4*a^2 + 18*a*b + 4*b^2 + 7*a^2*b^2 + 18*a*c + 18*b*c + 30*a^2*b*c + 30*a*b^2*c + 4*c^2 + 7*a^2*c^2 + 30*a*b*c^2 + 7*b^2*c^2 + 52*a^2*b^2*c^2 + 3*a^2*p^2 + 12*a*b*p^2 + 3*b^2*p^2 + 8*a^2*b^2*p^2 + 12*a*c*p^2 + 12*b*c*p^2 + 32*a^2*b*c*p^2 + 32*a*b^2*c*p^2 + 3*c^2*p^2 + 8*a^2*c^2*p^2 + 32*a*b*c^2*p^2 + 8*b^2*c^2*p^2 + 71*a^2*b^2*c^2*p^2 + 2*a^2*b^2*p^4 + 8*a^2*b*c*p^4 + 8*a*b^2*c*p^4 + 2*a^2*c^2*p^4 + 8*a*b*c^2*p^4 + 2*b^2*c^2*p^4 + 30*a^2*b^2*c^2*p^4 + 4*a^2*b^2*c^2*p^6";

fn ev(m: &[u32]) -> ExponentVector {
    ExponentVector::new(m.to_vec()).unwrap()
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    assert!(took < limit, "{what} took {took:?}, limit {limit:?}");
    out
}

fn check_expansion(printed: &str, m: &[u32], case: usize, symbolic: bool, limit: Duration) {
    let c = &enumerate_cases(m.len()).unwrap()[case - 1];
    let gap = timed(limit, "build", || if symbolic { build_gap_symbolic(&ev(m), c) } else { build_gap(&ev(m), c) })
        .unwrap();
    let expected = MultiPoly::parse(gap.poly.ring(), printed).unwrap();
    assert_eq!(gap.poly, expected, "{m:?} case {case}");
}

fn coefficient(p: &MultiPoly, powers: &[(&str, u32)]) -> BigRational {
    let mut e = vec![0u32; p.ring().len()];
    for (v, k) in powers {
        e[p.ring().index_of(v).unwrap()] = *k;
    }
    p.coefficient_of(&Monomial::new(e))
}

fn fixture(name: &str) -> CertificateFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}.gpicert"));
    parse(&std::fs::read(path).unwrap()).unwrap()
}

fn pointwise(cert: &gpisos::SosCertificate, f: &MultiPoly, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let x: Vec<BigRational> =
            (0..f.ring().len()).map(|_| rat(rng.gen_range(-60..=60), rng.gen_range(1..=11))).collect();
        let terms = cert.evaluate_terms(&x).unwrap();
        assert!(terms.iter().all(|t| !t.is_negative()));
        assert_eq!(terms.iter().sum::<BigRational>(), f.evaluate(&x).unwrap());
    }
}

fn c1_expansion_432() {
    check_expansion(F432, &[4, 3, 2], 1, false, Duration::from_secs(1));
}

fn c2_expansion_2111() {
    for (case, printed) in [(1, F2111_CASE1), (2, F2111_CASE2), (3, F2111_CASE3)] {
        check_expansion(printed, &[2, 1, 1, 1], case, false, Duration::from_secs(1));
    }
    let g = build_gap(&ev(&[2, 1, 1, 1]), &enumerate_cases(4).unwrap()[2]).unwrap().poly;
    assert_eq!(g.constant_term(), rat(42, 1));
    assert_eq!(coefficient(&g, &[("a", 2), ("b", 2), ("c", 2)]), rat(942, 1));
}

fn c3_symbolic_expansions() {
    let five = Duration::from_secs(5);
    check_expansion(FM32, &[1, 3, 2], 1, true, five);
    for (case, printed) in [(1, FM111_CASE1), (2, FM111_CASE2), (3, FM111_CASE3)] {
        check_expansion(printed, &[1, 1, 1, 1], case, true, five);
    }
    let g = build_gap_symbolic(&ev(&[1, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly;
    assert_eq!(g.constant_term(), rat(450, 1));
    assert_eq!(coefficient(&g, &[("a", 6), ("b", 4), ("p", 10)]), rat(16, 1));
    let g = build_gap_symbolic(&ev(&[1, 1, 1, 1]), &enumerate_cases(4).unwrap()[2]).unwrap().poly;
    assert_eq!(g.constant_term(), rat(7, 1));
}

fn c4_symbolic_concrete() {
    for (pattern, n) in [(vec![1, 3, 2], 3), (vec![1, 1, 1, 1], 4)] {
        for c in enumerate_cases(n).unwrap() {
            let sym = build_gap_symbolic(&ev(&pattern), &c).unwrap();
            for mstar in 1..=6u32 {
                let mut m = pattern.clone();
                m[0] = mstar;
                let concrete = build_gap(&ev(&m), &c).unwrap().poly;
                assert_eq!(specialize_symbolic(&sym, mstar).unwrap().embed(concrete.ring()).unwrap(), concrete);
            }
        }
    }
    // 2(2m−1)!! is 210 at m = 4 and 6 at m = 2.
    assert_eq!(rat(450, 1) * rat(210, 1), rat(94500, 1));
    assert_eq!(rat(7, 1) * rat(6, 1), rat(42, 1));
    let f432 = build_gap(&ev(&[4, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly;
    assert_eq!(f432.constant_term(), rat(94500, 1));
}

fn c5_fixtures() {
    timed(Duration::from_secs(30), "fixture verification", || {
        let opts = CertifyOptions::default();
        for name in ["f432", "f2111_case1", "f2111_case2", "f2111_case3"] {
            let file = fixture(name);
            let inst = GapInstance::from_descriptor(file.meta.instance.as_deref().unwrap()).unwrap();
            let rebuilt = build_instance(&inst).unwrap().poly.embed(&file.ring).unwrap();
            assert_eq!(file.target, rebuilt, "{name}");
            let cert = file.certificate();
            let v = verify_certificate(&cert, &rebuilt);
            assert!(v.ok, "{name}: {:?}", v.diagnostic);
            assert_eq!(check_strictness(&cert, &rebuilt, &opts), StrictnessVerdict::StrictConstantSquare, "{name}");
        }
    });
}

fn c6_self_certification() {
    for (m, case, limit) in [(vec![2, 1, 1, 1], 3, 60), (vec![4, 3, 2], 1, 120)] {
        let f = build_gap(&ev(&m), &enumerate_cases(m.len()).unwrap()[case - 1]).unwrap().poly;
        let c = timed(Duration::from_secs(limit), "certify", || certify(&f, &CertifyOptions::default())).unwrap();
        assert!(verify_certificate(&c.certificate, &f).ok);
        pointwise(&c.certificate, &f, 6);
    }
}

fn c7_oracle() {
    let report = run_oracle(20240601, 200, &OracleConfig::default()).unwrap();
    assert_eq!(report.cases.len(), 200);
    assert_eq!(report.mismatches(), 0);
    assert!(report.cases.iter().all(|c| c.exponents.len() <= 4 && c.exponents.sum() <= 6));
}

fn c8_motzkin() {
    let r = Ring::new(["x", "y"]).unwrap();
    let f = MultiPoly::parse(&r, "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1").unwrap();
    match certify(&f, &CertifyOptions::default()) {
        Err(CertifyError::NotSos { witness: Some(w), .. }) => assert!(w.refutes(&f)),
        other => panic!("expected a definitive refusal, got {other:?}"),
    }
}

fn c9_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let small = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
    // LDLᵀ reconstruction.
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let k = rng.gen_range(1..=n);
        let m = RationalMatrix::from_rows((0..k).map(|_| (0..n).map(|_| small(&mut rng)).collect()).collect()).unwrap();
        let a = m.transpose().mul(&m).unwrap();
        let f = ldlt(&a).unwrap();
        assert!(f.complete);
        assert_eq!(f.reconstruct(), a.permute_symmetric(&f.perm));
    }
    // Projection feasibility and extraction identity on gap instances.
    let targets = [
        build_gap(&ev(&[4, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly,
        build_gap(&ev(&[2, 1, 1, 1]), &enumerate_cases(4).unwrap()[1]).unwrap().poly,
    ];
    for f in &targets {
        let basis = select_basis(f, &BasisOptions::default());
        let sys = build_gram_system(f, &basis).unwrap();
        for den in [1u64, 1000, 1_000_000_000] {
            let n = basis.len();
            let mut g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
            g = &g + g.transpose();
            assert!(sys.is_satisfied_by(&round_and_project(&g, &sys, &BigInt::from(den)).unwrap()));
        }
    }
    let r = Ring::new(["x", "y"]).unwrap();
    let monos: Vec<Monomial> = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]].iter().map(|e| Monomial::new(e.to_vec())).collect();
    let basis = GramBasis::new(&r, monos);
    for _ in 0..20 {
        let k = rng.gen_range(1..=6);
        let m = RationalMatrix::from_rows((0..k).map(|_| (0..6).map(|_| small(&mut rng)).collect()).collect()).unwrap();
        let g = m.transpose().mul(&m).unwrap();
        let z: Vec<MultiPoly> = basis.monomials.iter().map(|u| MultiPoly::monomial(&r, u.clone(), rat(1, 1))).collect();
        let mut target = MultiPoly::zero(&r);
        for i in 0..6 {
            for j in 0..6 {
                target = &target + &(&z[i] * &z[j]).scale(g.get(i, j));
            }
        }
        let cert = extract_sos(&g, &basis, &target).unwrap();
        assert_eq!(cert.expand().unwrap(), target);
    }
    // Serialization round trip on emitted certificates.
    for f in &targets {
        let c = certify(f, &CertifyOptions::default()).unwrap();
        let meta = Metadata { strictness: Some(c.strictness.clone()), toolchain: "acceptance".into(), ..Metadata::default() };
        let file = CertificateFile::new(&c.certificate, f, meta).unwrap();
        let bytes = emit(&file).unwrap();
        let back = parse(&bytes).unwrap();
        assert_eq!(back, file);
        assert_eq!(emit(&back).unwrap(), bytes);
        assert!(verify_certificate(&back.certificate(), &back.target).ok);
    }
}

/// Budget in seconds from `GPI_STRETCH_SECS`, default 600.
fn c10_stretch() -> String {
    let secs = std::env::var("GPI_STRETCH_SECS").ok().and_then(|v| v.parse().ok()).unwrap_or(600);
    let f = build_gap_symbolic(&ev(&[1, 3, 2]), &enumerate_cases(3).unwrap()[0]).unwrap().poly;
    let opts = CertifyOptions { time_budget: Some(Duration::from_secs(secs)), ..CertifyOptions::default() };
    match certify(&f, &opts) {
        Ok(c) => {
            assert!(verify_certificate(&c.certificate, &f).ok);
            format!("{} squares, basis {}, {:.1?}", c.certificate.terms.len(), c.stats.basis_size, c.stats.elapsed)
        }
        Err(e) => format!("not certified within {secs} s (non-blocking): {e}"),
    }
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, bool, Box<dyn Fn() -> String>);
    let unit = |f: fn()| -> Box<dyn Fn() -> String> { Box::new(move || { f(); String::new() }) };
    let criteria: Vec<Criterion> = vec![
        (1, "expansion of F_{4,3,2}", true, unit(c1_expansion_432)),
        (2, "expansions of F_{2,1,1,1} cases 1-3", true, unit(c2_expansion_2111)),
        (3, "symbolic expansions F_{m,3,2}, F_{m,1,1,1} cases 1-3", true, unit(c3_symbolic_expansions)),
        (4, "symbolic/concrete cross-check m* = 1..6", true, unit(c4_symbolic_concrete)),
        (5, "published certificates verify, strict by constant square", true, unit(c5_fixtures)),
        (6, "self-certification of F_{2,1,1,1} case 3 and F_{4,3,2}", true, unit(c6_self_certification)),
        (7, "oracle equivalence on 200 seeded instances", true, unit(c7_oracle)),
        (8, "Motzkin polynomial refused definitively", true, unit(c8_motzkin)),
        (9, "property checks: LDL, projection, extraction, round trip", true, unit(c9_properties)),
        (10, "stretch: self-certification of F_{m,3,2}", false, Box::new(c10_stretch)),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout();
    for (id, name, blocking, run) in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed();
        let line = match &result {
            Ok(note) if note.is_empty() => format!("criterion {id:>2} PASS  {name} [{took:.2?}]"),
            Ok(note) => format!("criterion {id:>2} PASS  {name} [{took:.2?}] {note}"),
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                let tag = if *blocking { "FAIL" } else { "FAIL (non-blocking)" };
                format!("criterion {id:>2} {tag}  {name} [{took:.2?}]: {}", msg.unwrap_or_default())
            }
        };
        // Bypasses the test harness capture so the gate is always visible.
        writeln!(stdout, "{line}").unwrap();
        if result.is_err() && *blocking {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
