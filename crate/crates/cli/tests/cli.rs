use std::path::PathBuf;

use kl_sheaves_cli::{dispatch, EXIT_FAILS, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("klsheaf").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn matrix(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn a1(dir: &TempDir) -> String {
    matrix(dir, "a1.json", r#"{"generators": ["s1"], "m": [[1]]}"#).display().to_string()
}

fn a2(dir: &TempDir) -> String {
    matrix(dir, "a2.json", r#"{"generators": ["s1", "s2"], "m": [[1, 3], [3, 1]]}"#)
        .display()
        .to_string()
}

#[test]
fn kl_table_dihedral_closed_form() {
    let dir = TempDir::new().unwrap();
    let r = run(&["kl", "--matrix", &a2(&dir), "--x", "s1 s2 s1"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let gap = 3 - row["length"].as_u64().unwrap();
        let want = match gap {
            0 => "1".to_string(),
            1 => "v".to_string(),
            g => format!("v^{g}"),
        };
        assert_eq!(row["h"], want);
    }
}

#[test]
fn klcon_a1_holds() {
    let dir = TempDir::new().unwrap();
    let r = run(&["check", "klcon", "--matrix", &a1(&dir), "--x", "s1"]);
    assert_eq!(r.code, EXIT_OK);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v[0]["verdict"], "holds");
    assert_eq!(v[0]["conjecture"], "klcon");
    assert_eq!(v[0]["x"], "s1");
}

#[test]
fn graph_dot_a2() {
    let dir = TempDir::new().unwrap();
    let r = run(&["graph", "--matrix", &a2(&dir), "--x", "s1 s2 s1", "--format", "dot"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("digraph"));
    assert_eq!(r.out.matches("[label=").count(), 6 + 9);
    assert_eq!(r.out.matches(" -> ").count(), 9);
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    let r = run(&["kl", "--matrix", &a1(&dir), "--x", "s1", "--bogus"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("--bogus"));
    assert_eq!(run(&["kl", "--matrix", &a1(&dir)]).code, EXIT_USAGE);
    assert_eq!(run(&["kl", "--x", "s1"]).code, EXIT_USAGE);
    assert_eq!(run(&["kl", "--matrix", &a1(&dir), "--x", "s7"]).code, EXIT_USAGE);
    let bad = matrix(&dir, "bad.json", r#"{"generators": ["a", "b"], "m": [[1, 1], [1, 1]]}"#);
    assert_eq!(run(&["kl", "--matrix", bad.to_str().unwrap(), "--x", "a"]).code, EXIT_USAGE);
    let help = run(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.out.contains("check"));
}

#[test]
fn failing_verdict_sets_exit_two() {
    let dir = TempDir::new().unwrap();
    let m = a1(&dir);
    let r = run(&["check", "hl", "--matrix", &m, "--x", "s1", "--center", "literal"]);
    assert_eq!(r.code, EXIT_FAILS);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v[0]["verdict"], "fails");
    assert_eq!(v[0]["witness"]["m"], 1);
    let r = run(&["check", "hl", "--matrix", &m, "--x", "s1"]);
    assert_eq!(r.code, EXIT_OK);
    let r = run(&["check", "genmaps", "--coeff-range", "0", "--trials", "5"]);
    assert_eq!(r.code, EXIT_FAILS);
}

#[test]
fn non_reduced_word_warns() {
    let dir = TempDir::new().unwrap();
    let r = run(&["character", "--matrix", &a2(&dir), "--x", "s1 s1 s2", "--format", "text"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.err.contains("not reduced"));
    assert!(r.out.starts_with("s2:"));
}

#[test]
fn report_is_deterministic_and_cached() {
    let dir = TempDir::new().unwrap();
    let m = a2(&dir);
    let cache = dir.path().join("cache");
    let args = ["report", "--matrix", m.as_str(), "--x", "s1 s2 s1", "--x", "s1 s2", "--line-seed", "3"];
    let first = run(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.out);
    assert_eq!(run(&args).out, first.out);

    let mut cached: Vec<&str> = args.to_vec();
    let c = cache.to_str().unwrap();
    cached.extend(["--cache-dir", c]);
    assert_eq!(run(&cached).out, first.out);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
    assert_eq!(run(&cached).out, first.out);

    let reports: Vec<Value> = serde_json::from_str(&first.out).unwrap();
    for key in ["conjecture", "x", "y", "params", "verdict", "witness"] {
        assert!(reports.iter().all(|r| r.get(key).is_some()), "{key}");
    }
}

#[test]
fn sheaf_json_has_field_coefficients() {
    let dir = TempDir::new().unwrap();
    let m = matrix(&dir, "i5.json", r#"{"generators": ["s", "t"], "m": [[1, 5], [5, 1]]}"#);
    let r = run(&["sheaf", "--matrix", m.to_str().unwrap(), "--x", "s t"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    let label = &v["edges"][0]["label"][0];
    assert!(label.as_array().unwrap().iter().all(Value::is_string));
}

#[test]
fn enumerate_text() {
    let dir = TempDir::new().unwrap();
    let r = run(&["enumerate", "--matrix", &a2(&dir), "--max-length", "3", "--format", "text"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().count(), 6);
}
