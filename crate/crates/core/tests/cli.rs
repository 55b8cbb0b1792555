use std::process::{Command, Output};
use std::sync::Arc;

use bowen_series::analysis::{analyze, scan, AlphaSpec, AnalysisOptions};
use bowen_series::group::{build_domain, Signature};
use bowen_series::net::build_net;
use bowen_series::Mp;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bowen-series"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_verdicts_and_exit_codes() {
    let o = run(&["check", "6", "6", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"verdict":"InE","canonical":[6,6,3]}"#);
    let o = run(&["check", "3", "5", "6"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), r#"{"verdict":"ExtensionImpossible"}"#);
    let o = run(&["check", "4", "4", "2"]);
    assert_eq!(stdout(&o).trim(), r#"{"verdict":"NotHyperbolic"}"#);
    assert_eq!(run(&["check", "6", "six", "3"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "3", "5", "6", "--alpha-word", "1"]).status.code(), Some(3));
    assert_eq!(run(&["analyze", "6", "6", "3"]).status.code(), Some(2));
    assert_eq!(run(&["check", "6", "6", "3", "--precision", "32"]).status.code(), Some(2));
}

#[test]
fn analyze_matches_the_library_report() {
    for (m, word) in [([6, 6, 3], "4,4,2,2,3,1,4,4,1,4,4,4"), ([4, 4, 3], "3,2,4,1,3,1,4,1,3,2,2,3,1,4")] {
        let o = run(&[
            "analyze",
            &m[0].to_string(),
            &m[1].to_string(),
            &m[2].to_string(),
            "--alpha-word",
            word,
        ]);
        assert_eq!(o.status.code(), Some(0));
        let cli: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        let sig = Signature::new(m[0], m[1], m[2]).unwrap();
        let lib = analyze::<Mp>(sig, &AlphaSpec::Word(word.parse().unwrap()), &AnalysisOptions::default())
            .unwrap();
        assert_eq!(cli, serde_json::to_value(&lib).unwrap(), "{m:?}");
    }
}

#[test]
fn scan_matches_the_library_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = run(&[
        "scan", "4", "4", "3", "--overlap", "2", "--grid", "40", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["alpha", "surjective_predicate", "surjective_empirical", "markov_within_cap"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();

    let opts = AnalysisOptions::default();
    let fd = build_domain::<Mp>(Signature::new(4, 4, 3).unwrap(), &opts.tol).unwrap();
    let net = Arc::new(build_net(&fd, &opts.tol).unwrap());
    let lib = scan(&net, 2, 40, &opts).unwrap();
    assert_eq!(rows.len(), lib.len());
    let mut last = f64::NEG_INFINITY;
    for (r, l) in rows.iter().zip(&lib) {
        let alpha: f64 = r[0].parse().unwrap();
        assert_eq!(alpha, l.alpha);
        assert!(alpha > last);
        last = alpha;
        assert_eq!(r[1], l.surjective_predicate.to_string());
        assert_eq!(r[2], l.surjective_empirical.to_string());
        assert_eq!(r[3], l.markov_within_cap.to_string());
    }
    // surjective exactly on the first matching set
    assert!(lib.iter().any(|r| r.surjective_predicate));
    assert!(lib.iter().any(|r| !r.surjective_predicate));
}

#[test]
fn build_and_plot_outputs() {
    let o = run(&["build", "4", "6", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["signature"], serde_json::json!([4, 6, 2]));
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
    let o = run(&["build", "6", "6", "3", "--net"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["W"].as_array().unwrap().len(), 16);

    let o = run(&["plot", "6", "6", "3", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x_angle,f_angle,branch_index,generator"));
    assert_eq!(text.lines().count(), 1 + 8);
    // angles carry 17 significant digits
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap().to_string();
    let mantissa = first.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);

    let o = run(&["plot", "6", "6", "3", "--samples", "100", "--alpha-word", "4,4,2,2,3,1,4,4,1,4,4,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 100 + 10);
}
