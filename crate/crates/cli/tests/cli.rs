use std::process::Command as Proc;

use qonsager_cli::config::ModuleSpec;
use qonsager_cli::{report_format, report_value, run, Command, Format, RunConfig, RunReport};
use qonsager_core::Exec;
use serde_json::Value;

fn cfg(json: &str) -> RunConfig {
    RunConfig::from_json(json).expect("valid config")
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).expect("schema compiles")
}

fn json(r: &RunReport) -> String {
    String::from_utf8(report_format(r, Format::Json, false).unwrap()).unwrap()
}

#[test]
fn default_rank_one_factorization_passes() {
    let r = run(Command::Factorize, &RunConfig::default(), Exec::Parallel).unwrap();
    assert!(r.passed, "{:?}", r.failures());
    assert!(r.suites.iter().any(|s| s.name == "factorization: V_1(q)"));
}

#[test]
fn zero_c0_is_rejected() {
    let e = RunConfig::from_json(r#"{"params": {"c": ["0", "1"], "s": ["0", "0"]}}"#).unwrap_err();
    assert!(format!("{e:#}").contains("nonzero") || format!("{e:#}").contains("Onsager"), "{e:#}");
}

#[test]
fn config_errors() {
    for bad in [
        r#"{"T": 0}"#,
        r#"{"R": 0}"#,
        r#"{"colour": 1}"#,
        r#"{"checks": ["nonsense"]}"#,
        r#"{"modules": [{"kind": "eval", "n": 1, "a": "0"}]}"#,
        r#"{"modules": [{"kind": "eval", "n": 1, "a": "q^"}]}"#,
        r#"{"modules": [{"kind": "tensor", "factors": []}]}"#,
        r#"{"rank": {"N": 2, "a": "q", "c": ["1", "1", "1"], "s": ["1", "0", "0"]}}"#,
        r#"{"q0": 0.0}"#,
    ] {
        assert!(RunConfig::from_json(bad).is_err(), "accepted {bad}");
    }
}

#[test]
fn scalar_self_tests_alone_are_fast() {
    let t = std::time::Instant::now();
    let r = run(Command::Certify, &cfg(r#"{"checks": ["scalars"]}"#), Exec::Parallel).unwrap();
    assert!(r.passed);
    assert_eq!(r.suites.len(), 1);
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn empty_report_is_valid_json() {
    let r = RunReport::default();
    let v: Value = serde_json::from_slice(&report_format(&r, Format::Json, true).unwrap()).unwrap();
    assert!(v.is_object());
    assert!(schema().is_valid(&v));
}

#[test]
fn default_run_validates_against_schema() {
    let r = run(Command::Factorize, &RunConfig::default(), Exec::Parallel).unwrap();
    let v = report_value(&r, true).unwrap();
    assert!(schema().is_valid(&v));
    assert!(v.get("timings").is_some());
    assert!(report_value(&r, false).unwrap().get("timings").is_none());
}

#[test]
fn failed_checks_carry_witnesses() {
    // (V₁(q³), V₁(q)) is outside the twisted-primitive statement, so the coproduct check fails
    let c = cfg(r#"{"modules": [{"kind": "tensor", "factors": [{"n": 1, "a": "q^3"}, {"n": 1, "a": "q"}]}],
                   "checks": ["coproduct"], "T": 4}"#);
    let r = run(Command::Factorize, &c, Exec::Parallel).unwrap();
    assert!(!r.passed);
    for (_, c) in r.failures() {
        assert!(!c.detail.is_empty());
    }
    assert!(schema().is_valid(&report_value(&r, false).unwrap()));
}

#[test]
fn trivial_module_has_unit_drf() {
    let c = cfg(r#"{"modules": [{"kind": "trivial"}]}"#);
    assert_eq!(c.modules, vec![ModuleSpec::Trivial]);
    let r = run(Command::Drf, &c, Exec::Parallel).unwrap();
    assert!(r.passed, "{:?}", r.failures());
    let t = &r.suites[0].tables[0];
    let f = t.header.iter().position(|h| h == "F").unwrap();
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0][f], "1");
}

#[test]
fn exact_mode_is_deterministic() {
    let c = cfg(r#"{"modules": [{"kind": "eval", "n": 2, "a": "q"},
                                {"kind": "tensor", "factors": [{"n": 1, "a": "q"}, {"n": 1, "a": "q^3"}]}],
                   "params": {"c": ["q^2", "q^-2"], "s": ["1", "q"]}, "T": 4}"#);
    let a = json(&run(Command::Certify, &c, Exec::Parallel).unwrap());
    let b = json(&run(Command::Certify, &c, Exec::Sequential).unwrap());
    assert_eq!(a, b);
}

#[test]
fn drf_report_matches_golden_file() {
    let r = run(Command::Drf, &cfg(r#"{"modules": [{"kind": "eval", "n": 2, "a": "q"}]}"#), Exec::Parallel).unwrap();
    assert!(r.passed);
    let got = json(&r);
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/drf_v2.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(path, &got).unwrap();
    }
    let want = std::fs::read_to_string(path).expect("golden file");
    assert_eq!(got, want);
}

#[test]
fn csv_exports_eigenvalue_series() {
    let r = run(Command::Factorize, &RunConfig::default(), Exec::Parallel).unwrap();
    let text = String::from_utf8(report_format(&r, Format::Csv, false).unwrap()).unwrap();
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let recs: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(&recs[0][0], "eigenvalue series");
    assert_eq!(&recs[0][4], "z^0");
    // V₁(q) has two lines, each starting with eigenvalue 1
    assert_eq!(recs.len(), 3);
    assert_eq!(&recs[1][4], "1");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qonsager");
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"onedim": [{"c": ["1", "q"], "s": ["1", "0"]}]}"#).unwrap();
    let out = dir.path().join("report.json");
    let st = Proc::new(bin)
        .args(["onedim", "--no-timings", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(schema().is_valid(&v));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"params": {"c": ["0", "1"], "s": ["0", "0"]}}"#).unwrap();
    let st = Proc::new(bin).args(["certify", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let failing = dir.path().join("fail.json");
    std::fs::write(
        &failing,
        r#"{"modules": [{"kind": "tensor", "factors": [{"n": 1, "a": "q^3"}, {"n": 1, "a": "q"}]}],
            "checks": ["coproduct"]}"#,
    )
    .unwrap();
    let o = Proc::new(bin).args(["factorize", "--T", "3", "--format", "text", "--config"]).arg(&failing).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL coproduct"));
}
