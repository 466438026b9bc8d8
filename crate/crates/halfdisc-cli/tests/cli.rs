use std::path::PathBuf;
use std::process::{Command, Output};

fn halfdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfdisc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).expect("golden file")
}

#[test]
fn code_limit_word() {
    let o = halfdisc(&["code", "--theta", "sqrt2", "--x", "0", "--n", "29"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "AACACAACACABCACACAACACABCACAC\n");
    let s = halfdisc(&["code", "--theta", "sqrt2", "--n", "29", "--method", "symbolic"]);
    assert_eq!(stdout(&s), stdout(&o));
}

#[test]
fn examples_match_golden_files() {
    for name in ["sqrt2-fig", "golden-mean-fig", "ratio2-fig"] {
        let o = halfdisc(&["example", name]);
        assert!(o.status.success(), "{name}");
        assert_eq!(stdout(&o), golden(&format!("{name}.csv")), "{name}");
    }
}

#[test]
fn golden_mean_figure_has_two_series() {
    let g = golden("golden-mean-fig.csv");
    assert_eq!(g.matches("i,S_i\n").count(), 2);
    assert_eq!(g.lines().filter(|l| l.starts_with("100,")).count(), 2);
    assert!(g.starts_with("# x = 0\ni,S_i\n1,1\n2,0\n"));
}

#[test]
fn sums_csv_header() {
    let o = halfdisc(&["sums", "--theta", "golden", "--n", "5"]);
    assert_eq!(stdout(&o), "i,S_i\n1,1\n2,0\n3,1\n4,0\n5,1\n");
}

#[test]
fn verify_default_battery() {
    let o = halfdisc(&["verify", "--battery", "default", "--n", "100000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.contains("\"ok\":true")));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(halfdisc(&["code", "--theta", "nope", "--n", "3"]).status.code(), Some(2));
    assert_eq!(halfdisc(&["code", "--theta", "sqrt2"]).status.code(), Some(2));
    assert_eq!(halfdisc(&["verify", "--battery", "huge"]).status.code(), Some(2));
    assert_eq!(halfdisc(&["synth-growth", "--c", "cube", "--d", "sqrt"]).status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_1_with_json() {
    // golden-mean points are not in the field of sqrt(2)
    let o = halfdisc(&["code", "--theta", "sqrt2", "--x", "quad:1,1,4,5", "--n", "10", "--method", "symbolic"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).expect("json diagnostic");
    assert!(v.get("error").is_some());
}

#[test]
fn synth_specs_round_trip() {
    let o = halfdisc(&["synth-growth", "--c", "sqrt", "--d", "const:1", "--prefix", "3,1"]);
    assert!(o.status.success());
    let spec = stdout(&o);
    let d = halfdisc(&["synth-growth", "--c", "sqrt", "--d", "const:1", "--prefix", "3,1", "--format", "digits", "--count", "6"]);
    assert!(stdout(&d).starts_with("3,1,"));
    let code = halfdisc(&["heavy", "--theta", spec.trim(), "--n", "50"]);
    assert!(code.status.success());
    let r = halfdisc(&["synth-ratio", "--r1", "inf", "--r2", "inf", "--format", "digits", "--count", "4"]);
    assert_eq!(stdout(&r), "2,2,2,2\n");
}

#[test]
fn xtheta_golden_is_quadratic() {
    let o = halfdisc(&["xtheta", "--theta", "golden"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["kind"], "quadratic");
    assert!((v["approx"].as_f64().unwrap() - 0.809_016_994_374_947_4).abs() < 1e-12);
}

#[test]
fn bench_agrees_on_overlap() {
    let o = halfdisc(&["bench", "--n", "100000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["M"], 62);
}

#[test]
fn output_is_deterministic() {
    let a = halfdisc(&["synth-ratio", "--r1", "1", "--r2", "3", "--format", "digits", "--count", "30"]);
    let b = halfdisc(&["synth-ratio", "--r1", "1", "--r2", "3", "--format", "digits", "--count", "30"]);
    assert_eq!(a.stdout, b.stdout);
}
