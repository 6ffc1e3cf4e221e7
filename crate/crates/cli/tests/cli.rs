use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectrascope"));
    c.env_remove(spectrascope_cli::CAP_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model_path(name: &str) -> String {
    models_dir().join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn code_path(name: &str) -> String {
    models_dir().join("codes").join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn shipped_model_files_match_catalog() {
    for (name, model) in spectrascope::catalog::all_models() {
        let text = std::fs::read_to_string(model_path(name)).unwrap();
        let parsed = spectrascope::json::parse_model(&text).unwrap();
        assert_eq!(
            spectrascope::json::model_to_value(&parsed),
            spectrascope::json::model_to_value(&model),
            "{name}"
        );
    }
    for name in spectrascope::catalog::CODE_NAMES {
        let text = std::fs::read_to_string(code_path(name)).unwrap();
        let parsed = spectrascope::json::parse_code(&text).unwrap();
        let bundled = spectrascope::catalog::code(name).unwrap();
        assert_eq!(
            spectrascope::json::code_to_value(&parsed),
            spectrascope::json::code_to_value(&bundled),
            "{name}"
        );
    }
}

#[test]
fn spectrum_exact_writes_staircase() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["spectrum-exact", "--model", &model_path("mixture-0.3-0.7"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["kind"], "staircase");
    let jumps = v["jumps"].as_array().unwrap();
    assert_eq!(jumps.len(), 2);
    assert!((jumps[0][0].as_f64().unwrap() - 0.4689956).abs() < 1e-7);
    assert!((jumps[0][1].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert!((jumps[1][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((jumps[1][1].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!(!dir.path().join("s.json.partial").exists());
}

#[test]
fn spectrum_exact_csv_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&["spectrum-exact", "--model", "bundled:mixture-0.3-0.7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("tau,F\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn spectrum_exact_with_certified_rates() {
    let o = run(&["spectrum-exact", "--model", "bundled:mixture-0.3-0.7", "--rates", "1.0,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["jumps"][0][0].as_f64(), Some(0.5));
}

#[test]
fn identical_spectra_dominate() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    assert_eq!(
        run(&["spectrum-exact", "--model", "bundled:mixture-markov", "--out", s.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let o = run(&["dominance", "--upper", s.to_str().unwrap(), "--lower", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "dominates");
}

#[test]
fn violated_dominance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let hi = dir.path().join("hi.json");
    let lo = dir.path().join("lo.json");
    run(&["spectrum-exact", "--model", "bundled:fair-coin", "--out", hi.to_str().unwrap()]);
    run(&["spectrum-exact", "--model", "bundled:bernoulli-0.1", "--out", lo.to_str().unwrap()]);
    // a fair coin cannot be the image of a lower-entropy source
    let o = run(&["dominance", "--upper", hi.to_str().unwrap(), "--lower", lo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "violated");
    let o = run(&["dominance", "--upper", lo.to_str().unwrap(), "--lower", hi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lemma2_default_grid_passes() {
    let o = run(&[
        "verify",
        "lemma2",
        "--model",
        &model_path("markov-asym"),
        "--code",
        &code_path("xor3"),
        "--n",
        "3",
        "--grid",
        "default",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    let reports = v["reports"].as_array().unwrap();
    assert!(reports.len() >= 32);
    assert!(reports.iter().all(|r| r["pass"] == true));
}

#[test]
fn lemma2_rejects_unknown_grid() {
    let o = run(&["verify", "lemma2", "--model", "bundled:fair-coin", "--code", "bundled:identity", "--n", "2", "--grid", "dense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn change_of_measure_passes() {
    let o = run(&["verify", "change-of-measure", "--model", "bundled:mixture-markov", "--n", "6,8", "--gamma", "0.05,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["reports"].as_array().unwrap().len(), 8);
}

#[test]
fn change_of_measure_needs_mixture() {
    let o = run(&["verify", "change-of-measure", "--model", "bundled:fair-coin", "--n", "6", "--gamma", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn types_and_hamming_pass() {
    let o = run(&["verify", "types", "--n", "6", "--k", "2", "--alphabet-size", "3", "--model", "bundled:ternary-iid"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["partition"], true);
    assert_eq!(v["same_type_pass"], true);
    let o = run(&["verify", "hamming", "--n", "16", "--beta", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "hamming", "--n", "16", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tail_check_passes() {
    let o = run(&["verify", "tail", "--model", "bundled:ternary-iid", "--n", "6,8", "--gamma", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn cap_flag_and_env() {
    let args = ["verify", "types", "--n", "8", "--k", "1"];
    let o = bin().args(args).env(spectrascope_cli::CAP_ENV, "16").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = bin().args(["--cap", "1000"]).args(args).env(spectrascope_cli::CAP_ENV, "16").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin().args(args).env(spectrascope_cli::CAP_ENV, "lots").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_model_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema": 1, "type": "iid", "alphabet": ["0", "1"], "probs": [0.5, 0.6]}"#).unwrap();
    let out = dir.path().join("s.json");
    let o = run(&["spectrum-exact", "--model", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum-estimate", "--model", "bundled:fair-coin"]).status.code(), Some(1));
    let o = run(&["spectrum-estimate", "--model", "bundled:fair-coin", "--n", "10", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["spectrum-estimate", "--model", "bundled:fair-coin", "--n", "10", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["spectrum-exact", "--model", "bundled:no-such"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn estimate_custom_grid() {
    let o = run(&[
        "spectrum-estimate",
        "--model",
        "bundled:fair-coin",
        "--n",
        "50",
        "--samples",
        "200",
        "--tau-min",
        "0",
        "--tau-max",
        "2",
        "--tau-points",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["tau"].as_array().unwrap().len(), 5);
    assert_eq!(v["cdf"][4].as_f64(), Some(1.0));
}

#[test]
fn counterexample_demo_reports_non_isomorphic() {
    let o = run(&["iso-demo", "--demo", "counterexample"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["spectra_equal"], true);
    assert_eq!(v["verdict"], "non_isomorphic_by_ergodicity");
    assert!(v["pasting_rejected"].as_str().unwrap().contains("not isomorphic"));
}

#[test]
fn pasting_demo_small() {
    let o = run(&["iso-demo", "--n", "600", "--window", "500", "--samples", "400", "--max-tv", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["round_trip_failure_rate_classified"].as_f64(), Some(0.0));
}

#[test]
fn pasting_demo_needs_permutation_codes() {
    let o = run(&["iso-demo", "--codes", "bundled:xor3,bundled:identity", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn entropy_of_factor_reports_bracket() {
    let o = run(&["entropy", "--model", "bundled:xor3-markov", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let rate = &v["components"][0]["entropy_rate"];
    assert!(rate["lower"].as_f64().unwrap() <= rate["upper"].as_f64().unwrap());
    let o = run(&["entropy", "--model", "bundled:markov-flip-0.2"]);
    let v = stdout_json(&o);
    assert!((v["components"][0]["entropy_rate"]["exact"].as_f64().unwrap() - 0.721928095).abs() < 1e-9);
}

#[test]
fn in_process_run_returns_codes() {
    assert_eq!(spectrascope_cli::run(["spectrascope", "verify", "hamming", "--n", "10", "--beta", "0.2"]), 0);
    assert_eq!(spectrascope_cli::run(["spectrascope", "verify", "hamming"]), 1);
}
