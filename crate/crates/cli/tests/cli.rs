use std::process::{Command, Output};

use serde_json::Value;

fn gks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gks"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const EX41_IV: &str = "pw(u==0 -> fb(0); else -> fb(1)*mono(s) + fb(-1))";

#[test]
fn classify_non_member_exits_one() {
    let out = gks(&[
        "classify", "--alpha", "0.5", "--s", "0.5", "--sense", "2", "--trials", "2000", "--fn", EX41_IV,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["verdict"]["status"], "violation");
    assert!(v["verdict"]["witness"]["margin"].as_f64().unwrap() > 1e-9);
}

#[test]
fn classify_member_exits_zero() {
    let out = gks(&["classify", "--sense", "1", "--trials", "2000", "--fn", "mono(s)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verdict"]["status"], "proven_member");
}

#[test]
fn classify_reads_function_file() {
    let dir = std::env::temp_dir().join(format!("gks-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.gks");
    std::fs::write(&path, "mono(1)\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = gks(&["classify", "--trials", "1000", "--fn", &arg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["function"], "mono(1)");
}

#[test]
fn same_seed_same_bytes_across_thread_counts() {
    let base = ["classify", "--sense", "2", "--trials", "3000", "--seed", "7", "--fn", EX41_IV];
    let a = gks(&[&base[..], &["--threads", "1"]].concat());
    let b = gks(&[&base[..], &["--threads", "4"]].concat());
    let c = gks(&base);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn integrate_spot_value() {
    let out = gks(&["calc", "integrate", "--alpha", "0.5", "--fn", "mono(1)", "--from", "0", "--to", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!((v["result"]["value"].as_f64().unwrap() - 0.7978846).abs() < 1e-4);
    assert!(v["result"]["convergence_estimate"].is_number());
}

#[test]
fn derive_continuity_ratio_ftc() {
    let d = json_of(&gks(&["calc", "derive", "--fn", "mono(1)", "--at", "0"]));
    assert!((d["result"]["value"].as_f64().unwrap() - 0.886_226_925_452_758).abs() < 1e-8);

    let c = gks(&[
        "calc", "continuity", "--fn", "pw(u<=1 -> fv(1); else -> fv(2)*mono(1))", "--at", "1",
    ]);
    assert_eq!(json_of(&c)["result"]["continuous"], false);

    let r = json_of(&gks(&["calc", "ratio-limit", "--f", "mono(1)", "--g", "fv(2)*mono(1)", "--at", "0"]));
    assert!((r["result"]["derivative_ratio"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);

    let f = json_of(&gks(&["calc", "ftc", "--fn", "mono(2)", "--from", "0", "--at", "1.5"]));
    assert!(f["result"]["residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn sandwich_csv_columns() {
    let out = gks(&["sandwich", "--fn", "mono(1)", "--trials", "2000", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,lower_value,phi_value,upper_value"));
    let at_one: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("1,"))
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((at_one[1] - 0.5).abs() < 1e-4);
    assert!((at_one[2] - 0.7071).abs() < 1e-4);
    assert!((at_one[3] - 1.0).abs() < 1e-4);
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn theorem_suite_all_holds() {
    let out = gks(&["theorems", "--suite", "all", "--corpus", "default", "--json", "--trials", "5000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["conclusion_status"]["status"] == "holds"));
}

#[test]
fn examples_ex42_csv_to_file() {
    let path = std::env::temp_dir().join(format!("gks-ex42-{}.csv", std::process::id()));
    let out = gks(&[
        "examples", "--family", "ex42", "--trials", "5000", "--output", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("family,a,b,c,k,s,alpha,sense,expected,observed,rule_id,margin,agrees"));
    assert_eq!(text.lines().count(), 1 + 12);
}

#[test]
fn usage_and_eval_errors_exit_two() {
    assert_eq!(gks(&["classify"]).status.code(), Some(2));
    assert_eq!(gks(&["classify", "--fn", "mono("]).status.code(), Some(2));
    assert_eq!(gks(&["classify", "--fn", "mono(1)", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(gks(&["classify", "--fn", "mono(1)", "--output", "csv"]).status.code(), Some(2));
    assert_eq!(gks(&["calc", "integrate", "--fn", "mono(1)", "--from", "1", "--to", "0"]).status.code(), Some(2));
}
