use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loctame")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn cbox(name: &str) -> String {
    root().join("cboxes").join(name).display().to_string()
}

#[test]
fn endocarditis_holds() {
    let o = run(&["check", &cbox("endocarditis.cbox")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Endocarditis sub Heartdisease: SUBSUMED"));
}

#[test]
fn bottom_is_subsumed_by_anything() {
    let f = temp("? bot sub X\n");
    let o = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn failing_query_exits_one() {
    let f = temp("A sub B\n? B sub A\n? A sub B\n");
    let o = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("B sub A: NOT SUBSUMED"));
    assert!(out.contains("A sub B: SUBSUMED"));
}

#[test]
fn parse_error_exits_two() {
    let f = temp("A sub\n");
    let o = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn json_report_has_stable_fields() {
    let o = run(&["check", "--json", "--mode", "instantiate", &cbox("cyclic.cbox")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"], "instantiate");
    let q = &v["queries"][0];
    for key in ["query", "verdict", "psi_size", "clause_count", "micros_per_stage"] {
        assert!(q.get(key).is_some(), "missing {key}");
    }
    assert_eq!(q["verdict"], "SUBSUMED");
    assert!(q["clause_count"]["instantiate"].as_u64().unwrap() > q["clause_count"]["chase"].as_u64().unwrap());
}

#[test]
fn emit_psi_lists_the_closure() {
    let o = run(&["check", "--emit-psi", &cbox("endocarditis.cbox")]);
    let out = stdout(&o);
    let psi: Vec<&str> = out.lines().skip_while(|l| l.trim() != "psi:").skip(1).map(str::trim).collect();
    assert_eq!(
        psi,
        [
            "f_cont-in(Heart)",
            "f_cont-in(HeartValve)",
            "f_cont-in(HeartWall)",
            "f_has-loc(Endocard)",
            "f_has-loc(Heart)",
            "f_has-loc(HeartValve)",
            "f_has-loc(HeartWall)",
            "f_part-of(Heart)",
        ]
    );
}

#[test]
fn emitted_reduction_solves_the_same() {
    let o = run(&["check", "--emit-reduction", &cbox("cyclic.cbox")]);
    let dump: String = stdout(&o)
        .lines()
        .filter(|l| ["fact ", "clause ", "goal "].iter().any(|p| l.starts_with(p)))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(dump.contains("goal "));
    let f = temp(&dump);
    let o = run(&["solve", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("UNSAT"));
}

#[test]
fn explain_names_each_step() {
    let o = run(&["explain", &cbox("endocarditis.cbox")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("HeartWall <= c{f_cont-in(Heart)}"));
    assert!(out.lines().skip(1).all(|l| l.starts_with('(')));
}

#[test]
fn explain_rejects_non_theorems() {
    let f = temp("? A sub B\n");
    let o = run(&["explain", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_empty_cbox() {
    let f = temp("? A sub B\n");
    let o = run(&["classify", "--json", f.path().to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matrix"], serde_json::json!([[true, false], [false, true]]));
}

#[test]
fn normalize_flag_keeps_verdicts() {
    for file in ["cyclic.cbox", "endocarditis.cbox"] {
        let o = run(&["check", "--normalize", &cbox(file)]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stdout(&o));
    }
}

#[test]
fn interpolate_semi_galois() {
    let o = run(&["interpolate", &cbox("sgc.interp")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "f(d) <= c");
}

#[test]
fn cross_check_is_deterministic() {
    let a = run(&["cross-check", "--samples", "10", "--seed", "3", "--json"]);
    let b = run(&["cross-check", "--samples", "10", "--seed", "3", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}
