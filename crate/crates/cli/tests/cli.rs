use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gpisos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpisos")).args(args).env("GPI_WORKERS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn build_prints_known_gaps() {
    let o = gpisos(&["build", "--exponents", "1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.trim() == "2*a^2"));

    let o = gpisos(&["build", "--exponents", "4,3,2", "--terms"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.trim() == "94500 1"));
    assert!(text.lines().any(|l| l.trim() == "34454700 a^6*b^4"));

    let o = gpisos(&["build", "--exponents", "m,1,1,1", "--case", "3", "--symbolic", "--terms"]);
    assert!(stdout(&o).lines().any(|l| l.trim() == "7 1"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&gpisos(&["build", "--exponents", "m,1"])), 1);
    assert_eq!(code(&gpisos(&["build", "--exponents", "4,3", "--case", "2"])), 1);
    assert_eq!(code(&gpisos(&["nonsense"])), 1);
    assert_eq!(code(&gpisos(&["--help"])), 0);
}

fn certify_into(exponents: &str, dir: &Path) -> Output {
    gpisos(&["certify", "--exponents", exponents, "--out", dir.to_str().unwrap()])
}

#[test]
fn certify_chain_and_verify_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = certify_into("2,1,1,1", dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["inequality_certified"], true);
    assert_eq!(report["equality_characterization"], true);
    let labels: Vec<&str> =
        report["subproblems"].as_array().unwrap().iter().map(|s| s["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["F_{2,1,1,1} case 1", "F_{2,1,1,1} case 2", "F_{2,1,1,1} case 3", "F_{2,1,1} case 1", "F_{2,1} case 1"]);
    assert!(dir.path().join("report.txt").exists());
    assert!(dir.path().join("progress.log").exists());

    let o = gpisos(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn certify_432_covers_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    let o = certify_into("4,3,2", dir.path());
    assert_eq!(code(&o), 0);
    for name in ["F_4-3-1_case1", "F_4-3-2_case1", "F_4-1_case1", "F_4-2_case1", "F_4-3_case1"] {
        assert!(dir.path().join(format!("{name}.gpicert")).exists(), "{name}");
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let strip = |dir: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
        for s in v["subproblems"].as_array_mut().unwrap() {
            s.as_object_mut().unwrap().remove("elapsed_ms");
            s.as_object_mut().unwrap().remove("certificate");
        }
        v
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    certify_into("2,1,1,1", a.path());
    let o = Command::new(env!("CARGO_BIN_EXE_gpisos"))
        .args(["certify", "--exponents", "2,1,1,1", "--out", b.path().to_str().unwrap()])
        .env("GPI_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(strip(a.path()), strip(b.path()));
    for entry in fs::read_dir(a.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|x| x == "gpicert") {
            assert_eq!(fs::read(&p).unwrap(), fs::read(b.path().join(p.file_name().unwrap())).unwrap());
        }
    }
}

#[test]
fn paper_fixtures_verify() {
    let o = gpisos(&["verify", "--paper-fixtures"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7);
    assert!(text.lines().any(|l| l.starts_with("XFAIL") && l.contains("fm111_case2")));
}

#[test]
fn tampered_file_fails_with_first_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/f2111_case3.gpicert");
    let text = fs::read_to_string(src).unwrap().replacen("square 942 ", "square 943 ", 1);
    let path = dir.path().join("tampered.gpicert");
    fs::write(&path, text).unwrap();
    let o = gpisos(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("FAIL") && stdout(&o).contains("mismatch at"), "{}", stdout(&o));
}

#[test]
fn motzkin_is_refused_with_status_2() {
    let o = gpisos(&["sos", "--vars", "x,y", "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("dual witness"));
}

#[test]
fn oracle_is_deterministic() {
    let a = gpisos(&["oracle", "--seed", "7", "--count", "50"]);
    let b = gpisos(&["oracle", "--seed", "7", "--count", "50"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("mismatches 0"));
}

#[test]
fn oracle_skips_over_budget_cases() {
    let o = gpisos(&["oracle", "--seed", "3", "--count", "40", "--max-sum", "12", "--pairing-budget", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.contains(" skipped ")), "{}", stdout(&o));
}

#[test]
fn conjecture_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = gpisos(&["conjecture", "--n", "3", "--m", "1,1,1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("H(0) = 0: yes"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("H_n3_1-1-1.json")).unwrap()).unwrap();
    assert_eq!(report["vanishes_at_origin"], true);
    let o = gpisos(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}
