mod common;

use std::process::Command;

use p6groups::cli::run;

fn data() -> String {
    common::data_dir().display().to_string()
}

fn p6(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["p6".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    if !args.contains(&"--data") {
        full.push("--data".into());
        full.push(data());
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn count_prints_the_formula_value() {
    let (code, out, _) = p6(&["count", "--p", "7"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("860"));
    assert!(out.contains("24 gcd(p-1, 3) = 72"));
    assert_eq!(p6(&["count", "--p", "13"]).1.lines().next(), Some("1476"));
    let (code, out, _) = p6(&["count", "--p", "11", "--format", "machine"]);
    assert_eq!((code, out.as_str()), (0, "count p=11 total=1192 quadratic=1136 gcd3=1 gcd4=2 gcd5=5\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(p6(&["count", "--p", "6"]).0, 2);
    assert_eq!(p6(&["count", "--p", "5"]).0, 2);
    assert_eq!(p6(&["count"]).0, 2);
    assert_eq!(p6(&["frobnicate", "--p", "7"]).0, 2);
    assert_eq!(p6(&["verify", "--p", "5"]).0, 2);
    assert_eq!(p6(&["verify", "--p", "7", "--budget", "0"]).0, 2);
    assert_eq!(p6(&["list", "--p", "7", "--format", "xml"]).0, 2);
    assert_eq!(p6(&["inspect", "--p", "7"]).0, 2);
    assert_eq!(p6(&["inspect", "--p", "7", "--index", "861"]).0, 2);
    assert_eq!(p6(&["list", "--p", "7", "--family", "44"]).0, 2);
    let (code, _, err) = p6(&["verify", "--p", "7", "--data", "/nonexistent/dir"]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/dir"));
    assert_eq!(p6(&["--help"]).0, 0);
}

#[test]
fn list_family_one() {
    let (code, out, _) = p6(&["list", "--p", "7", "--family", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 11);
    assert!(out.starts_with("1\t(1,1)\n"));
    let (_, machine, _) = p6(&["list", "--p", "7", "--format", "machine"]);
    assert_eq!(machine.lines().count(), 860);
    assert!(machine.lines().all(|l| l.starts_with("entry p=7 index=")));
}

#[test]
fn inspect_first_entry() {
    let (code, out, _) = p6(&["inspect", "--p", "7", "--index", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("#1 (1,1)"));
    let class: u32 = out
        .lines()
        .find_map(|l| l.trim().strip_prefix("nilpotency class"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(class <= 5);
    let (_, machine, _) = p6(&["inspect", "--p", "7", "--label", "(21,7rs) r=2 s=1", "--format", "machine"]);
    assert_eq!(machine.lines().count(), 1);
    assert!(machine.contains("label=\"(21,7rs) r=2 s=1\""));
}

#[test]
fn export_writes_one_script_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("scripts");
    let o = out_dir.display().to_string();
    let (code, out, _) = p6(&["export", "--p", "7", "--family", "21", "--label", "(21,7rs)", "--out", &o]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 21);
    let mut files: Vec<_> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 21);
    let first = std::fs::read_to_string(&files[0]).unwrap();
    assert!(first.starts_with("# family 21 (21,7rs) r=0 s=1\n# p = 7\n# parameters: r=0 s=1\n"));
    // same bytes on a second run
    let (_, again, _) = p6(&["export", "--p", "7", "--family", "21", "--label", "(21,7rs)", "--dialect", "gap-style"]);
    let joined: String = files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
    assert_eq!(again, joined);
    let (_, magma, _) = p6(&["export", "--p", "7", "--index", "12", "--dialect", "magma-style"]);
    assert!(magma.contains("quo<GrpPC"));
}

#[test]
fn verify_reports_pass_and_failure() {
    let (code, out, _) = p6(&["verify", "--p", "11"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("1192/1192 consistent"));
    assert!(out.ends_with("result: PASS\n"));
    let dir = common::corrupted_data();
    let d = dir.path().display().to_string();
    let (code, out, _) = p6(&["verify", "--p", "7", "--no-profiles", "--data", &d]);
    assert_eq!(code, 1);
    assert!(out.contains(common::CORRUPTED_LABEL));
    let (code, out, _) = p6(&["verify", "--p", "7", "--no-profiles", "--data", &d, "--format", "machine"]);
    assert_eq!(code, 1);
    assert!(out.contains("result status=fail"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_p6");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["count", "--p", "7"]), Some(0));
    assert_eq!(status(&["count", "--p", "6"]), Some(2));
    let d = data();
    assert_eq!(status(&["verify", "--p", "13", "--data", &d, "--workers", "1"]), Some(0));
}
