use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Runs the binary and returns `(exit code, csv text)`.
fn run(kind: &str, config: &Path, extra: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_slope-lab"))
        .arg(kind)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .status()
        .unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (status.code().unwrap(), text)
}

fn rows<'a>(csv: &'a str, metric: &str) -> Vec<Vec<&'a str>> {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|r| r.get(1) == Some(&metric))
        .collect()
}

#[test]
fn hs_check_exact_fixture_ends_with_zero_gap() {
    let (code, csv) = run("hs-check", &fixture("hs_tent.json"), &[]);
    assert_eq!(code, 0);
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(&last[..4], &["hs-check", "final_gap", "200", "0/1"]);
    assert_eq!(rows(&csv, "chi_est").len(), 200);
}

#[test]
fn hs_check_failure_exits_one() {
    let (code, csv) = run("hs-check", &fixture("hs_constant.json"), &[]);
    assert_eq!(code, 1);
    assert_eq!(rows(&csv, "final_gap")[0][3], "1/50");
    assert_eq!(rows(&csv, "verdict")[0][3], "fail");
}

#[test]
fn check_axioms_passes_and_records_seed() {
    let (code, csv) = run("check-axioms", &fixture("check_axioms.json"), &["--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "seed")[0][3], "42");
    assert_eq!(rows(&csv, "checked").len(), 5);
    assert!(rows(&csv, "checked").iter().all(|r| r[3] == "100"));
}

#[test]
fn malformed_rational_exits_two() {
    let (code, _) = run("hs-check", &fixture("bad_rational.json"), &[]);
    assert_eq!(code, 2);
}

#[test]
fn config_errors_exit_two() {
    let (code, _) = run("hs-check", &fixture("does_not_exist.json"), &[]);
    assert_eq!(code, 2);
    let (code, _) = run("slopes", &fixture("hs_tent.json"), &[]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "fekete", "params": {"unknown": 1}}"#).unwrap();
    assert_eq!(run("fekete", &bad, &[]).0, 2);
    std::fs::write(&bad, r#"{"params": {"tolerance": "1/-2"}, "divisors": {}}"#).unwrap();
    assert_eq!(run("hs-check", &bad, &[]).0, 2);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for (kind, name) in [
        ("cone-scan", "cone_p1.json"),
        ("check-axioms", "check_axioms.json"),
        ("series-invariants", "series_tent.json"),
    ] {
        let a = run(kind, &fixture(name), &["--seed", "3"]);
        let b = run(kind, &fixture(name), &["--seed", "3", "--jobs", "1"]);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn planted_violation_is_reported_with_witness() {
    let (code, csv) = run("series-invariants", &fixture("series_planted.json"), &[]);
    assert_eq!(code, 1);
    let v = rows(&csv, "violation:delta_superadditivity");
    assert_eq!(v.len(), 1);
    assert_eq!(v[0][3], "-1/1");
    assert!(v[0][7].contains("monomials=(0) (1)"));
}

#[test]
fn series_invariants_of_the_tent() {
    let (code, csv) = run("series-invariants", &fixture("series_tent.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "mu_max_asy")[0][3], "1/2");
    assert_eq!(rows(&csv, "mu_min_inf")[0][3], "0/1");
    let body: Vec<&str> = rows(&csv, "body_vertex").iter().map(|r| r[3]).collect();
    assert_eq!(body, ["(0/1)", "(1/1)"]);
    assert!(rows(&csv, "level_vertex").iter().any(|r| r[3] == "empty"));
}

#[test]
fn cone_scan_rows_and_checks() {
    let (code, csv) = run("cone-scan", &fixture("cone_p1.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "vol_chi").len(), 12);
    assert_eq!(rows(&csv, "vol_i").len(), 11);
    assert!(rows(&csv, "ratio").iter().any(|r| r[3] == "undefined"));
    assert_ne!(rows(&csv, "midpoint_triples_checked")[0][3], "0");
}

#[test]
fn certificates() {
    let (code, csv) = run("certificate", &fixture("certificate_tent.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "S")[0][3], "0/1");
    assert_eq!(rows(&csv, "verified_up_to")[0][3], "200");
    let (code, csv) = run("certificate", &fixture("certificate_bundle.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "multidegrees_checked")[0][3], "230");
}

#[test]
fn slopes_fekete_and_chi_vol() {
    let (code, csv) = run("slopes", &fixture("slopes.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "mu_min")[0][3], "-1/1");
    let (code, csv) = run("fekete", &fixture("fekete_tent.json"), &[]);
    assert_eq!(code, 0);
    let lam: Vec<&str> = rows(&csv, "lambda").iter().map(|r| r[3]).collect();
    let prime: Vec<&str> = rows(&csv, "lambda_prime").iter().map(|r| r[3]).collect();
    assert_eq!(lam, prime);
    let (code, csv) = run("chi-vol", &fixture("chi_vol_simplex.json"), &[]);
    assert_eq!(code, 0);
    assert_eq!(rows(&csv, "chi_est")[0][3], "33/25");
    assert_eq!(rows(&csv, "chi_volume_oracle")[0][3], "1/1");
}
