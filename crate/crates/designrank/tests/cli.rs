use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_designrank"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn gen_fano_header() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "fano.txt");
    ok(&["gen", "pg", "-m", "2", "-d", "2", "-q", "2", "--out", &f]);
    let text = std::fs::read_to_string(&f).unwrap();
    assert_eq!(text.lines().next(), Some("7 7 21"));
}

#[test]
fn gen_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "lin.txt");
    ok(&["gen", "lin", "-m", "5", "--out", &f]);
    let header = std::fs::read_to_string(&f).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("121 121 "));
    let h = p(dir.path(), "h.txt");
    ok(&["gen", "hermitian", "-q", "3", "--out", &h]);
    let header = std::fs::read_to_string(&h).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, format!("63 28 {}", 63 * 4));
}

#[test]
fn snf_fano_record() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "fano.txt");
    let r = p(dir.path(), "fano.json");
    ok(&["gen", "pg", "-m", "2", "-d", "2", "-q", "2", "--out", &f]);
    ok(&["snf", &f, "--out", &r]);
    let rec = json(Path::new(&r));
    assert_eq!(rec["schema"], 1);
    assert_eq!(rec["method"], "elimination");
    assert_eq!(rec["invariants"], serde_json::json!([[1, 4], [2, 2], [6, 1]]));
    assert_eq!(rec["ranks"]["2"], 4);
    assert!(rec["wall_time_ms"].is_number());
    let report = ok(&["check", &r]);
    assert!(!report.contains("FAIL"));
    assert!(ok(&["compare", &r, &r]).trim() == "equal");
}

#[test]
fn character_sum_on_circulant_and_non_circulant() {
    let dir = tempfile::tempdir().unwrap();
    let ds = p(dir.path(), "s.ds");
    let mat = p(dir.path(), "s.txt");
    ok(&["gen", "singer", "-m", "2", "-q", "3", "--out", &ds]);
    ok(&["gen", "singer", "-m", "2", "-q", "3", "--out", &mat]);
    let a = json_stdout(&["snf", &ds, "--method", "character-sum"]);
    let b = json_stdout(&["snf", &mat, "--method", "character-sum"]);
    assert_eq!(a["snf"], "1^7 3^5 12^1");
    assert_eq!(a["invariants"], b["invariants"]);

    let pg = p(dir.path(), "pg.txt");
    ok(&["gen", "pg", "-m", "3", "-d", "2", "-q", "2", "--out", &pg]);
    let out = run(&["snf", &pg, "--method", "character-sum"]);
    assert_eq!(out.status.code(), Some(2));
}

fn json_stdout(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn partial_primes() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "pg.txt");
    ok(&["gen", "pg", "-m", "2", "-d", "2", "-q", "3", "--out", &f]);
    let rec = json_stdout(&["snf", &f, "-p", "3"]);
    assert!(rec["invariants"].is_null());
    assert_eq!(rec["profiles"]["3"][0], 7);
}

#[test]
fn predictions() {
    assert_eq!(
        json_stdout(&["predict", "pg", "-m", "2", "-d", "2", "-q", "4"])["snf"],
        "1^10 2^2 4^8 20^1"
    );
    assert_eq!(
        json_stdout(&["predict", "ag", "-m", "2", "-d", "1", "-q", "3"])["snf"],
        "1^6 3^3"
    );
    assert_eq!(json_stdout(&["predict", "hermitian", "-q", "4"])["snf"], "1^52 5^13");
    let lin = json_stdout(&["predict", "lin", "-m", "9"]);
    assert_eq!(lin["ranks"]["3"], 144);
    assert_eq!(lin["extra"]["threes_count"]["1"], 1440);
}

#[test]
fn corrupted_record_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "fano.txt");
    let r = p(dir.path(), "fano.json");
    ok(&["gen", "pg", "-m", "2", "-d", "2", "-q", "2", "--out", &f]);
    ok(&["snf", &f, "--out", &r]);
    let mut rec = json(Path::new(&r));
    rec["invariants"] = serde_json::json!([[1, 4], [2, 2], [12, 1]]);
    std::fs::write(&r, rec.to_string()).unwrap();
    let out = run(&["check", &r]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn nonsymmetric_skips_symmetric_clauses() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "ag.txt");
    let r = p(dir.path(), "ag.json");
    ok(&["gen", "ag", "-m", "2", "-d", "1", "-q", "3", "--out", &f]);
    ok(&["snf", &f, "--out", &r]);
    let report = ok(&["check", &r]);
    assert!(report.contains("SKIP d_v = kn/t"));
}

#[test]
fn compare_lin_hkm_at_three() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (p(dir.path(), "lin.ds"), p(dir.path(), "hkm.ds"));
    ok(&["gen", "lin", "-m", "3", "--out", &a]);
    ok(&["gen", "hkm", "-m", "3", "-q", "3", "--out", &b]);
    let (ra, rb) = (p(dir.path(), "lin.json"), p(dir.path(), "hkm.json"));
    ok(&["snf", &a, "--method", "character-sum", "--out", &ra]);
    ok(&["snf", &b, "--out", &rb]);
    assert_eq!(ok(&["compare", &ra, &rb]).trim(), "equal");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = p(dir.path(), "bad.txt");
    // two blocks of a 4-point space, not a 2-design
    std::fs::write(&bad, "2 4 4\n1 1\n1 2\n2 3\n2 4\n").unwrap();
    assert_eq!(run(&["snf", &bad]).status.code(), Some(3));
    assert_eq!(
        run(&["gen", "pg", "-m", "2", "-d", "2", "-q", "6"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["gen", "pg", "-m", "5", "-d", "3", "-q", "9"]).status.code(),
        Some(4)
    );
    assert_eq!(run(&["predict", "bm", "-q", "3"]).status.code(), Some(2));
}

#[test]
fn sweep_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "sweep.jsonl");
    let text = ok(&["sweep", "ag", "-m", "3", "-q", "2,3", "--threads", "2", "--out", &out]);
    assert!(!text.contains("MISMATCH"));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 6);
}
