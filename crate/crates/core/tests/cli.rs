use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dlk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlk")).args(args).env_remove("DLK_ARITH_CMD").output().unwrap()
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("dlk-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn shipped_scripts_match_goldens() {
    for name in ["di_cubic", "derive_m"] {
        let out = dlk(&["check", example(&format!("{name}.dlp")).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        let golden = std::fs::read_to_string(example(&format!("{name}.expected"))).unwrap();
        assert_eq!(text(&out.stdout), golden);
    }
}

#[test]
fn sample_mode_keeps_the_obligation() {
    let out = dlk(&["check", example("di_cubic.dlp").to_str().unwrap(), "--arith", "sample", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "1");
    assert_eq!(v["goals"][0]["conclusion"], "x*x>=1 -> [{x'=x^3}] x*x>=1");
    assert_eq!(v["goals"][0]["obligations"], serde_json::json!(["x^3*x+x*x^3>=0"]));
}

#[test]
fn external_oracle_outcomes() {
    let file = example("di_cubic.dlp");
    let f = file.to_str().unwrap();
    let run = |cmd: &str| dlk(&["check", f, "--arith", "external", "--arith-cmd", cmd, "--json"]);
    let valid = run("cat >/dev/null; exit 0");
    assert_eq!(valid.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&valid.stdout).unwrap();
    assert_eq!(v["goals"][0]["obligations"], serde_json::json!([]));
    let unknown = run("cat >/dev/null; exit 2");
    let v: serde_json::Value = serde_json::from_slice(&unknown.stdout).unwrap();
    assert_eq!(v["goals"][0]["obligations"], serde_json::json!(["x^3*x+x*x^3>=0"]));
    let refuted = run("cat >/dev/null; exit 1");
    assert_eq!(refuted.status.code(), Some(1));
    let missing = dlk(&["check", f, "--arith", "external"]);
    assert_eq!(missing.status.code(), Some(2));
    let from_env = Command::new(env!("CARGO_BIN_EXE_dlk"))
        .args(["check", f, "--arith", "external"])
        .env("DLK_ARITH_CMD", "grep -q 'x^3' && exit 0")
        .output()
        .unwrap();
    assert_eq!(from_env.status.code(), Some(0), "{}", text(&from_env.stderr));
    assert!(!text(&from_env.stdout).contains("obligation"));
}

#[test]
fn clashes_exit_one_and_name_the_taboo() {
    let cases: [(&[&str], &str); 4] = [
        (&["--subst", r#"((pred p 1) ".!=x") ((fn f 0) "x+1")"#, "--on", "[x:=f()]p(x) <-> p(f())"], "taboo is {x}"),
        (&["--subst", r#"((pred p 0) "x>=0")"#, "--axiom", "V-all"], "taboo is {x}"),
        (&["--subst", r#"((pred p 0) "x>=0") ((prog a) "x:=x-1")"#, "--axiom", "V"], "taboo is {x}"),
        (&["--subst", r#"((prog a) "x:=0")"#, "--axiom", "B"], "unknown axiom B"),
    ];
    for (args, needle) in cases {
        let mut all = vec!["subst"];
        all.extend_from_slice(args);
        let out = dlk(&all);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(text(&out.stderr).contains(needle), "{args:?}: {}", text(&out.stderr));
    }
}

#[test]
fn clash_json_has_path_and_taboo() {
    let out = dlk(&["subst", "--json", "--subst", r#"((pred p 1) ".!=x")"#, "--on", "[x:=1] p(x)"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["clash"]["taboo"], serde_json::json!(["x"]));
    assert_eq!(v["clash"]["path"], "postcondition");
    assert_eq!(v["clash"]["kind"], "modality");
}

#[test]
fn static_emits_sets() {
    let out = dlk(&["static", "[x:=1 ++ y:=2] x>=1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fv"], serde_json::json!(["x"]));
    let out = dlk(&["static", "[a] p(||)"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fv"], serde_json::json!({"allBut": []}));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(dlk(&["parse", "x+"]).status.code(), Some(2));
    assert_eq!(dlk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dlk(&["check", "/nonexistent/script.dlp"]).status.code(), Some(2));
    let bad = scratch("syntax.dlp", "(qed (axiom K)");
    assert_eq!(dlk(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tampered_derivation_is_rejected() {
    let s = scratch("tampered.dlp", "(qed (mp (axiom K) (hyp \"p(||) -> q(||)\")) \"[a] p(||) -> [a] q(||)\")");
    let out = dlk(&["check", s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("premise mismatch"));
}

#[test]
fn eval_reports_truth() {
    let out = dlk(&["eval", "(x*x)'", "--state", "x=2,x'=3"]);
    assert_eq!(text(&out.stdout).trim(), "12");
    assert_eq!(dlk(&["eval", "x>=1", "--state", "x=2"]).status.code(), Some(0));
    assert_eq!(dlk(&["eval", "x>=1", "--state", "x=0"]).status.code(), Some(1));
    let out = dlk(&["eval", "f(x)>=4", "--state", "x=2", "--defs", r#"((fn f 1) ".^2")"#]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let out = dlk(&["eval", "x:=x+1 ++ x:=0", "--state", "x=5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_exports_csv() {
    let out = dlk(&["simulate", "{x'=x^3}", "--state", "x=1", "--h", "0.001", "--t-max", "0.4"]);
    let csv = text(&out.stdout);
    assert_eq!(csv.lines().next(), Some("t,x,x'"));
    assert_eq!(csv.lines().count(), 402);
    let out = dlk(&["simulate", "{x'=x^3}", "--state", "x=1", "--h", "0.001", "--t-max", "0.4", "--check", "x*x", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["maxDeviation"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn axioms_listing() {
    let out = dlk(&["axioms", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["axioms"].as_array().unwrap().len(), 28);
    let out = dlk(&["axioms", "[∪]"]);
    assert!(text(&out.stdout).contains("[a ++ b] p(||)"), "{}", text(&out.stdout));
    assert_eq!(dlk(&["axioms", "B"]).status.code(), Some(1));
}

#[test]
fn output_is_reproducible() {
    let f = example("di_cubic.dlp");
    let a = dlk(&["check", f.to_str().unwrap(), "--arith", "sample", "--seed", "9", "--json"]);
    let b = dlk(&["check", f.to_str().unwrap(), "--arith", "sample", "--seed", "9", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
