use bergspec::cli::{run, EXIT_INCONCLUSIVE, EXIT_NUMERIC, EXIT_OK, EXIT_REFUSED};
use bergspec::config::ExperimentConfig;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bergspec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn with_config(json: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), json).unwrap();
    f
}

fn envelope(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn weights_command_succeeds() {
    let cfg = repo("configs/weights_standard.json");
    let (code, out, _) = invoke(&["weights", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = envelope(&out);
    assert_eq!(v["command"], "weights");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["exit_code"], 0);
}

#[test]
fn missing_continuity_evidence_is_refused() {
    let cfg = repo("configs/example2_p1_refused.json");
    let (code, out, err) = invoke(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_REFUSED);
    assert_eq!(envelope(&out)["status"], "refused");
    assert!(err.contains("continuity"));
}

#[test]
fn borderline_membership_is_inconclusive() {
    let cfg = with_config(
        r#"{"semigroup":{"closed_form":"koebe"},"spectrum":{"target":"point","opening":3.141592653589793}}"#,
    );
    let (code, out, _) = invoke(&["spectrum", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    let v = envelope(&out);
    assert_eq!(v["status"], "inconclusive");
    assert_eq!(v["result"]["undecided"], serde_json::json!([1]));
}

#[test]
fn degenerate_symbol_is_a_numeric_error() {
    let cfg = with_config(
        r#"{"resolvent":{"mode":"apply","h":{"coeffs":[[0,0],[0,0],[1,0]],"polynomial":true},"operator":"R_h","f":{"coeffs":[[1,0]],"polynomial":true}}}"#,
    );
    let (code, out, _) = invoke(&["resolvent", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_NUMERIC);
    assert_eq!(envelope(&out)["status"], "error");
}

#[test]
fn usage_and_config_errors_exit_three() {
    assert_eq!(invoke(&["frobnicate"]).0, EXIT_REFUSED);
    assert_eq!(invoke(&["weights", "--truncation", "many"]).0, EXIT_REFUSED);
    assert_eq!(invoke(&["weights", "--tol", "2"]).0, EXIT_REFUSED);
    assert_eq!(invoke(&["weights", "--emit-plot-data"]).0, EXIT_REFUSED);
    let bad = with_config(r#"{"weight":{"kind":"standard","alpha":0},"colour":"red"}"#);
    assert_eq!(
        invoke(&["weights", "--config", bad.path().to_str().unwrap()]).0,
        EXIT_REFUSED
    );
    assert_eq!(
        invoke(&["weights", "--config", "/nonexistent/cfg.json"]).0,
        EXIT_REFUSED
    );
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("spectrum") && out.contains("resolvent"));
}

#[test]
fn output_is_deterministic_and_written_to_out() {
    let cfg = repo("configs/example3_semigroup.json");
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let run_in = |d: &Path| {
        invoke(&[
            "semigroup",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d.to_str().unwrap(),
            "--emit-plot-data",
        ])
    };
    let (c1, o1, _) = run_in(d1.path());
    let (c2, o2, _) = run_in(d2.path());
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(o1, o2);
    for name in ["semigroup.json", "trajectory.csv"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let saved: Value =
        serde_json::from_slice(&std::fs::read(d1.path().join("semigroup.json")).unwrap()).unwrap();
    assert_eq!(saved, envelope(&o1));
    let csv = std::fs::read_to_string(d1.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "z0_re,z0_im,t,re,im");
    assert!(csv.lines().count() > 10);
}

#[test]
fn weights_profile_csv_columns() {
    let cfg = repo("configs/weights_standard.json");
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = invoke(&[
        "weights",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        d.path().to_str().unwrap(),
        "--emit-plot-data",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_path(d.path().join("weights_profile.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["r", "omega_hat", "omega_star"]);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let r: f64 = rec[0].parse().unwrap();
        let hat: f64 = rec[1].parse().unwrap();
        // α = 0: ω̂(r) = 1 - r
        assert!((hat - (1.0 - r)).abs() < 1e-10, "{r}: {hat}");
    }
}

#[test]
fn flags_override_config() {
    let cfg = with_config(r#"{"resolvent":{"mode":"bloch","h":"z/(1-z)"},"truncation":64}"#);
    let (code, out, _) = invoke(&[
        "resolvent",
        "--config",
        cfg.path().to_str().unwrap(),
        "--truncation",
        "8192",
    ]);
    assert!(code == EXIT_OK || code == EXIT_INCONCLUSIVE, "{out}");
    let v = envelope(&out);
    let limit = v["result"]["bloch"]["limit"].as_f64().unwrap();
    assert!((limit - 2.0).abs() < 1e-2, "{limit}");
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bergspec");
    let ok = Command::new(bin)
        .args(["weights", "--config"])
        .arg(repo("configs/weights_standard.json"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(
        envelope(std::str::from_utf8(&ok.stdout).unwrap())["status"],
        "ok"
    );
    let refused = Command::new(bin)
        .args(["spectrum", "--config"])
        .arg(repo("configs/example2_p1_refused.json"))
        .output()
        .unwrap();
    assert_eq!(refused.status.code(), Some(EXIT_REFUSED));
}

#[test]
fn shipped_configs_validate() {
    let mut count = 0;
    for entry in std::fs::read_dir(repo("configs")).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::from_path(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 10);
}

/// Section keys and scalar defaults in the config schema match the parser.
#[test]
fn config_schema_matches_defaults() {
    let schema: Value =
        serde_json::from_slice(&std::fs::read(repo("schemas/config.schema.json")).unwrap())
            .unwrap();
    let props = schema["properties"].as_object().unwrap();
    let defaults = serde_json::to_value(ExperimentConfig::default()).unwrap();
    let top = defaults.as_object().unwrap();
    for key in top.keys() {
        assert!(props.contains_key(key), "schema lacks top-level key {key}");
    }
    for section in [
        "weights",
        "spectrum",
        "difference",
        "resolvent",
        "trajectory",
    ] {
        let want = props[section]["properties"].as_object().unwrap();
        let got = top[section].as_object().unwrap();
        let mut a: Vec<_> = want.keys().collect();
        let mut b: Vec<_> = got.keys().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b, "keys of section {section}");
        for (k, spec) in want {
            if let Some(d) = spec.get("default") {
                if d.is_number() || d.is_string() || d.is_boolean() {
                    let g = &got[k];
                    let same = match (d.as_f64(), g.as_f64()) {
                        (Some(x), Some(y)) => x == y,
                        _ => d == g,
                    };
                    assert!(
                        same,
                        "{section}.{k}: schema default {d}, parser default {g}"
                    );
                }
            }
        }
    }
    assert_eq!(props["p"]["default"].as_f64(), top["p"].as_f64());
}

#[test]
fn radius_profile_csv_columns() {
    let cfg = repo("configs/dilation_spectrum.json");
    let d = tempfile::tempdir().unwrap();
    let (code, _, _) = invoke(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        d.path().to_str().unwrap(),
        "--emit-plot-data",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_path(d.path().join("radius_profile.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["r", "ratio", "n"]);
    let first = rdr.records().next().unwrap().unwrap();
    assert_eq!(&first[2], "1");
}
