//! End-to-end tests of the `entroq` binary: exit codes, JSON wire formats,
//! CSV output, and determinism.

use std::io::Write;
use std::process::{Command, Output};

fn entroq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entroq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn usage_and_domain_errors_exit_3() {
    assert_eq!(code(&entroq(&["alpha", "--k", "1"])), 3);
    assert_eq!(code(&entroq(&["alpha", "--k", "nan"])), 3);
    assert_eq!(code(&entroq(&["verify", "--k", "2", "--depth", "0"])), 3);
    assert_eq!(code(&entroq(&["verify", "--k", "2", "--exclusion", "0.5"])), 3);
    assert_eq!(code(&entroq(&["scan", "--k", "2", "--grid", "1"])), 3);
    assert_eq!(code(&entroq(&["ucs", "exhaustive", "--n", "9", "--k", "2"])), 3);
    assert_eq!(code(&entroq(&["no-such-command"])), 3);
    assert_eq!(code(&entroq(&["alpha", "--k", "2", "--no-such-flag"])), 3);
    assert_eq!(code(&entroq(&["alpha"])), 3); // missing required --k
}

#[test]
fn help_and_version_exit_0() {
    let h = entroq(&["--help"]);
    assert_eq!(code(&h), 0);
    assert!(stdout(&h).contains("entropy"));
    assert_eq!(code(&entroq(&["--version"])), 0);
    assert_eq!(code(&entroq(&["verify", "--help"])), 0);
    assert_eq!(code(&entroq(&["ucs", "probe", "--help"])), 0);
}

#[test]
fn alpha_json_round_trips_to_exact_bits() {
    let out = entroq(&["alpha", "--k", "2", "--tol", "1e-12", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["k"].as_f64().unwrap(), 2.0);
    let lo: f64 = v["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo < hi);
    // the golden-ratio constant: (sqrt 5 - 1)/2
    assert!(lo <= 0.6180339887498949 && 0.6180339887498949 <= hi);
    assert_eq!(v["width"].as_f64().unwrap(), hi - lo);
    assert!(v["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn verify_json_has_the_expected_shape() {
    let out = entroq(&[
        "verify", "--k", "3", "--exclusion", "1e-3", "--depth", "30", "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["k"].as_f64().unwrap(), 3.0);
    assert_eq!(v["overall"].as_str().unwrap(), "certified_except_zones");
    assert!(v["min_certified_margin"].as_f64().unwrap() > 0.0);
    let regions = v["regions"].as_array().unwrap();
    assert!(regions.len() > 100);
    // regions tile [0, 1] in order
    assert_eq!(regions[0]["lo"].as_f64().unwrap(), 0.0);
    assert_eq!(regions[regions.len() - 1]["hi"].as_f64().unwrap(), 1.0);
    let zone_count = regions
        .iter()
        .filter(|r| {
            let s = r["status"].as_str().unwrap();
            s == "endpoint_zone" || s == "equality_zone"
        })
        .count();
    assert_eq!(zone_count, 3);
}

#[test]
fn verify_exit_codes_follow_the_verdict() {
    // planted violation: certified falsification, exit 1
    let out = entroq(&[
        "verify", "--k", "2", "--defect-shift", "1e-3", "--depth", "25",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("falsified"));

    // a shift too small to certify negative but fatal to the equality-zone
    // samples: inconclusive, exit 2
    let out = entroq(&[
        "verify", "--k", "2", "--defect-shift", "1e-9", "--depth", "35",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("inconclusive"));
}

#[test]
fn scan_writes_csv_with_header_and_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let out = entroq(&["scan", "--k", "2", "--grid", "101", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,q,D,u_residual");
    assert_eq!(lines.len(), 102);
    // endpoint conventions: q = 1/k, D = 0, residual = 0
    let first: Vec<f64> = lines[1].split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 0.5, 0.0, 0.0]);
    let last: Vec<f64> = lines[101].split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(&first[1..], &last[1..]);
    assert_eq!(last[0], 1.0);
    // stdout mode emits the same bytes
    let out = entroq(&["scan", "--k", "2", "--grid", "101"]);
    assert_eq!(stdout(&out), text);
}

fn family_file(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ucs_check_reports_closure_stats() {
    let dir = tempfile::tempdir().unwrap();

    // the power set of [2] is union-closed: c = 1, bound applies, satisfied
    let p = family_file(&dir, "power.txt", "2\n∅\n1\n2\n1,2\n");
    let out = entroq(&["ucs", "check", "--family", &p, "--k", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["c"].as_f64().unwrap(), 1.0);
    assert_eq!(v["epsilon"].as_f64().unwrap(), 0.0);
    assert_eq!(v["max_freq"]["count"].as_u64().unwrap(), 2);
    assert_eq!(v["max_freq"]["of"].as_u64().unwrap(), 4);
    assert!((v["bound"].as_f64().unwrap() - 0.3819660112501052).abs() < 1e-9);
    assert_eq!(v["satisfied"].as_bool().unwrap(), true);

    // {∅, {1}, {2}}: c = 7/9, the bound at |F| = 3 is vacuous (negative)
    let q = family_file(&dir, "three.txt", "2\n∅\n1\n2\n");
    let out = entroq(&["ucs", "check", "--family", &q, "--k", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["c"].as_f64().unwrap() - 7.0 / 9.0).abs() < 1e-15);
    assert!(v["bound"].as_f64().unwrap() < 0.0);
    assert_eq!(v["satisfied"].as_bool().unwrap(), true);

    // malformed input: line number on stderr, exit 3
    let bad = family_file(&dir, "bad.txt", "3\n1,2\n1,foo\n");
    let out = entroq(&["ucs", "check", "--family", &bad, "--k", "2"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 3"), "stderr: {}", stderr(&out));

    // missing file: exit 3
    let out = entroq(&["ucs", "check", "--family", "/nonexistent/f.txt", "--k", "2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn ucs_exhaustive_matches_known_count() {
    let out = entroq(&["ucs", "exhaustive", "--n", "3", "--k", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["families_checked"].as_u64().unwrap(), 254);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["tuple_convention"].as_str().unwrap(), "ordered_with_repetition");
    assert!((v["min_slack"].as_f64().unwrap() - 0.11803398874989485).abs() < 1e-9);
}

#[test]
fn ucs_probe_is_deterministic_across_workers_and_runs() {
    let args = [
        "ucs", "probe", "--n", "5", "--k", "2", "--trials", "400", "--seed", "42", "--json",
    ];
    let a = entroq(&args);
    let b = entroq(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let mut with_workers: Vec<&str> = args.to_vec();
    with_workers.extend_from_slice(&["--workers", "4"]);
    let c = entroq(&with_workers);
    assert_eq!(stdout(&a), stdout(&c));
    // different seed, different stream
    let mut other_seed: Vec<&str> = args.to_vec();
    other_seed[9] = "43";
    let d = entroq(&other_seed);
    assert_ne!(stdout(&a), stdout(&d));
}
