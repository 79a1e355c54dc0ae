use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn roe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roe"))
        .args(args)
        .env_remove("ROE_BIT_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = roe(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("a single JSON document")
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn expand_examples() {
    let v = json(&["expand", "--system", "sylvester", "--depth", "4", "1/2"]);
    assert_eq!(strings(&v["digits"]), ["3", "7", "43", "1807"]);
    assert_eq!(strings(&v["alphas"]), ["2", "1", "1", "1"]);
    let v = json(&["expand", "--system", "engel", "--depth", "3", "1/2"]);
    assert_eq!(strings(&v["digits"]), ["3", "3", "3"]);
    assert_eq!(v["inf"]["exact"], "13/27");

    let text = stdout(&roe(&["expand", "--system", "luroth", "--depth", "4", "0.5"]));
    assert!(text.contains("digits  3 2 2 2"), "{text}");

    let out = roe(&["expand", "--system", "sylvester", "3/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
    assert_eq!(roe(&["expand", "one half"]).status.code(), Some(2));
}

#[test]
fn cylinder_examples() {
    let v = json(&["cylinder", "--system", "sylvester", "2", "3"]);
    assert_eq!(v["length"]["exact"], "1/6");
    assert_eq!(v["inf"]["exact"], "5/6");
    let v = json(&["cylinder", "2"]);
    assert_eq!(v["length"]["exact"], "1/2");
    assert_eq!(roe(&["cylinder", "--system", "sylvester", "3", "6"]).status.code(), Some(2));
}

#[test]
fn expand_output_feeds_cylinder() {
    for system in ["engel", "sylvester", "luroth"] {
        for x in ["1/3", "13/27", "451/903", "0.7071"] {
            let v = json(&["expand", "--system", system, "--depth", "5", x]);
            let digits = strings(&v["digits"]);
            let mut args = vec!["cylinder", "--system", system];
            args.extend(digits.iter().map(String::as_str));
            let cyl = json(&args);
            assert_eq!(cyl["inf"], v["inf"]);
            assert_eq!(cyl["sup"], v["sup"]);
            let x_exact = v["x"]["exact"].as_str().unwrap();
            let parse = |s: &str| roe::rational::parse_rational(s).unwrap();
            let (inf, sup) = (parse(cyl["inf"]["exact"].as_str().unwrap()), parse(cyl["sup"]["exact"].as_str().unwrap()));
            let x = parse(x_exact);
            assert!(inf < x && x <= sup, "{system} {x_exact}");
        }
    }
}

#[test]
fn eval_accepts_digits_and_symbols() {
    let v = json(&["eval", "--system", "sylvester", "3,7,43"]);
    assert_eq!(v["value"]["exact"], "451/903");
    let w = json(&["eval", "--system", "sylvester", "--alphas", "2", "1", "1"]);
    assert_eq!(w["digits"], v["digits"]);
    assert_eq!(roe(&["eval", "--alphas", "0", "1"]).status.code(), Some(2));
}

#[test]
fn transition_and_bounds() {
    let v = json(&["transition", "--system", "sylvester", "3", "7"]);
    assert_eq!(v["h"], "6");
    assert_eq!(v["transitions"][0]["prob"]["exact"], "1/7");
    let v = json(&["transition", "--system", "engel", "4", "--rows", "5"]);
    let rows = v["transitions"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["cdf"]["exact"], "5/8");
    let v = json(&["transition", "--system", "sylvester", "3", "6"]);
    assert_eq!(v["transitions"][0]["prob"]["exact"], "0/1");
    assert_eq!(v["transitions"][0]["cdf"]["exact"], "0/1");
    assert_eq!(roe(&["transition", "--position", "1", "3"]).status.code(), Some(2));

    let v = json(&["bounds", "--system", "sylvester", "--window", "4,10"]);
    assert_eq!(v["l"][0]["l"]["exact"], "1/43");
    assert_eq!(v["verdict"], "Summable");
    assert!(v["sum"]["decimal"].as_str().unwrap().starts_with("0.023809"));
    let v = json(&["bounds", "--system", "engel", "--depth", "10"]);
    assert_eq!(v["sum"]["exact"], "9/2");
    assert_eq!(v["verdict"], "NonSummable");
    let csv = stdout(&roe(&["bounds", "--system", "luroth", "--depth", "4", "--format", "csv"]));
    assert_eq!(csv, "k,l\n2,1/2\n3,1/2\n4,1/2\n");
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--system", "sylvester", "--measure", "lebesgue", "--samples", "3", "--seed", "7"];
    let a = roe(&args);
    let b = roe(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 3);
    let other = roe(&["sample", "--system", "sylvester", "--samples", "3", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn xi_sampling_needs_a_distribution() {
    let geo = write_temp("geo.json", r#"{"iid": true, "pmf": {"type": "geometric", "p": "1/2"}}"#);
    let v = json(&["sample", "--measure", "xi", "--dist", geo.to_str().unwrap(), "--samples", "10"]);
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 10);
    for s in samples {
        for a in strings(&s["alphas"]) {
            assert!(a.parse::<u64>().unwrap() >= 1);
        }
    }
    assert_eq!(roe(&["sample", "--measure", "xi"]).status.code(), Some(2));
    let bad = write_temp("bad.json", r#"{"iid": true, "pmf": {"type": "table", "values": ["1/2", "1/4"]}}"#);
    assert_eq!(
        roe(&["sample", "--measure", "xi", "--dist", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn diagnose_exit_codes_and_verdicts() {
    let geo = write_temp("geo-diag.json", r#"{"iid": true, "pmf": {"type": "geometric", "p": "1/2"}}"#);
    let dist = geo.to_str().unwrap();
    let v = json(&[
        "diagnose", "--system", "sylvester", "--dist", dist, "--window", "4,20", "--samples", "20000", "--seed", "3",
    ]);
    assert_eq!(v["verdict"], "SingularityEvidence");
    assert_eq!(v["singularity"]["bounds"]["mu_lower"]["exact"], "131071/131072");

    let out = roe(&["diagnose", "--system", "engel", "--dist", dist, "--samples", "200", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "HypothesisFails");

    assert_eq!(roe(&["diagnose", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(roe(&["diagnose", "--window", "5,3", "--samples", "10"]).status.code(), Some(2));

    let csv = stdout(&roe(&["diagnose", "--samples", "5", "--window", "3,6", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "measure,sample,count");
    assert_eq!(lines.len(), 11);
}

#[test]
fn custom_systems_are_validated() {
    let good = write_temp("square.json", r#"{"name": "square", "a_poly": [0, 1], "b_poly": [1]}"#);
    let v = json(&["validate", "--custom", good.to_str().unwrap(), "--j-max", "200", "--n-max", "3"]);
    assert_eq!(v["integrality_ok"], true);
    assert_eq!(v["h_monotone_in_j"], true);
    let spec = format!("custom:{}", good.display());
    let v = json(&["cylinder", "--system", &spec, "2", "5"]);
    assert_eq!(v["system"], "square");

    let bad = write_temp("bad-system.json", r#"{"name": "bad", "a_poly": [1], "b_poly": [1, 1]}"#);
    assert_eq!(roe(&["validate", "--custom", bad.to_str().unwrap(), "--j-max", "50"]).status.code(), Some(3));
    assert_eq!(roe(&["expand", "--custom", bad.to_str().unwrap(), "1/2"]).status.code(), Some(2));
    assert_eq!(roe(&["expand", "--system", "cantor", "1/2"]).status.code(), Some(2));
    assert_eq!(
        roe(&["expand", "--system", "engel", "--custom", good.to_str().unwrap(), "1/2"]).status.code(),
        Some(2)
    );
}

#[test]
fn bit_budget_from_flag_and_environment() {
    let out = roe(&["expand", "--system", "sylvester", "--depth", "12", "--bit-budget", "64", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bit budget"));
    let out = Command::new(env!("CARGO_BIN_EXE_roe"))
        .args(["expand", "--system", "sylvester", "--depth", "12", "1/2"])
        .env("ROE_BIT_BUDGET", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(roe(&["expand", "--system", "sylvester", "--depth", "12", "1/2"]).status.code(), Some(0));
}

#[test]
fn every_command_emits_one_json_document() {
    let runs: [&[&str]; 7] = [
        &["expand", "1/3"],
        &["eval", "2", "3"],
        &["cylinder", "2", "3"],
        &["transition", "2"],
        &["bounds"],
        &["sample", "--samples", "2"],
        &["validate"],
    ];
    for args in runs {
        let v = json(args);
        assert!(v.is_object(), "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(roe(&[]).status.code(), Some(2));
    assert_eq!(roe(&["expand", "--depth", "0", "1/2"]).status.code(), Some(2));
    assert_eq!(roe(&["expand", "--precision", "0", "1/2"]).status.code(), Some(2));
    assert_eq!(roe(&["--help"]).status.code(), Some(0));
}
