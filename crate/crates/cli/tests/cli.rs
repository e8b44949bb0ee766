//! End-to-end tests of the `torus-cauchy` binary: exit codes, artifact
//! formats, determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-cauchy"))
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn power_law_file(k: u32, l: u32) -> String {
    // a2 = -i t^k (factored when k > 0), a1 = i t^l
    let a2 = if k == 0 {
        r#"{"form": "poly", "coefficients": [[0.0, -1.0]]}"#.to_string()
    } else {
        format!(
            r#"{{"form": "factored",
                 "zeros": [{{"location": 0.0, "order": {k}, "factor_sign": "negative"}}],
                 "remainder": [[0.0, -1.0]]}}"#
        )
    };
    let drift_orders = format!("[{l}]");
    format!(
        r#"{{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {{
    "a2": {a2},
    "a1": [{{"form": "poly", "coefficients": [[0.0, 1.0]]}}],
    "a0": {{"form": "poly", "coefficients": []}}
  }},
  "structure": {{
    "leading": {{"kind": "degenerate",
                 "zeros": [{{"time": 0.0, "leading_order": {k}, "drift_orders": {drift_orders}}}]}},
    "drifts": [{{"kind": "degenerate-orders"}}]
  }}
}}"#
    )
}

#[test]
fn classify_subcritical_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &power_law_file(3, 1));
    let out = bin().arg("classify").arg(&spec).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["sobolev"], "well-posed");
    assert_eq!(v["smooth"], "well-posed");
    assert_eq!(v["gevrey_threshold"], "inf");
    assert_eq!(v["analytic"], "well-posed");
}

#[test]
fn classify_supercritical_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &power_law_file(4, 0));
    let out = bin().arg("classify").arg(&spec).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["sobolev"], "ill-posed");
    assert_eq!(v["smooth"], "ill-posed");
    assert_eq!(v["analytic"], "well-posed");
    let threshold = v["gevrey_threshold"].as_f64().unwrap();
    assert!((threshold - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn classify_infinite_order_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "named", "profile": "flat-exp-derivative", "scale": 1.0, "amplitude": [0.0, -1.0]},
    "a1": [{"form": "poly", "coefficients": []}],
    "a0": {"form": "poly", "coefficients": []}
  },
  "structure": {
    "leading": {"kind": "infinite-order"},
    "drifts": [{"kind": "identically-zero"}]
  }
}"#;
    let spec = write(dir.path(), "spec.json", text);
    let out = bin().arg("classify").arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("infinite order"));
}

#[test]
fn schema_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // unknown key "horizons"
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"dimension": 1, "horizons": 1.0, "coefficients": {}}"#,
    );
    let out = bin().arg("classify").arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // structurally valid JSON but missing structure block
    let spec2 = write(
        dir.path(),
        "spec2.json",
        r#"{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "poly", "coefficients": [[0.0, -1.0]]},
    "a1": [{"form": "poly", "coefficients": []}],
    "a0": {"form": "poly", "coefficients": []}
  }
}"#,
    );
    let out = bin().arg("classify").arg(&spec2).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

fn heat_solve_file(with_data: bool) -> String {
    let data = if with_data {
        r#""data": {
    "initial": {"kind": "table", "entries": [
      {"frequency": [-8], "value": [1.0, 0.0]},
      {"frequency": [-4], "value": [1.0, 0.0]},
      {"frequency": [0],  "value": [1.0, 0.0]},
      {"frequency": [4],  "value": [1.0, 0.0]},
      {"frequency": [8],  "value": [1.0, 0.0]}
    ]},
    "forcing": {"kind": "zero"}
  },"#
    } else {
        ""
    };
    format!(
        r#"{{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {{
    "a2": {{"form": "poly", "coefficients": [[0.0, -1.0]]}},
    "a1": [{{"form": "poly", "coefficients": []}}],
    "a0": {{"form": "poly", "coefficients": []}}
  }},
  {data}
  "solve": {{"times": [1.0], "truncation": 8, "nodes_per_unit": 64}}
}}"#
    )
}

#[test]
fn solve_heat_kernel_row() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(true));
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("field_t0.csv")).unwrap();
    let row = csv
        .lines()
        .find(|l| l.starts_with("4,"))
        .expect("row for xi = 4");
    assert!(row.contains("-1.6000000000000000e1"));
    // manifest carries the settings hash
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["settings"]["truncation"], 8);
    assert!(manifest["settings_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn solve_zero_data_emits_minus_inf() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(false));
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("field_t0.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 17); // xi in -8..=8
    for row in rows {
        assert!(
            row.contains(",-inf,"),
            "row {row} should be the zero sentinel"
        );
    }
}

#[test]
fn solve_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(true));
    let (d1, d2) = (dir.path().join("r1"), dir.path().join("r2"));
    for d in [&d1, &d2] {
        let out = bin()
            .arg("solve")
            .arg(&spec)
            .arg("--out")
            .arg(d)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(d1.join("field_t0.csv")).unwrap(),
        fs::read(d2.join("field_t0.csv")).unwrap()
    );
    assert_eq!(
        fs::read(d1.join("manifest.json")).unwrap(),
        fs::read(d2.join("manifest.json")).unwrap()
    );
}

#[test]
fn witness_flat_profile_diverges_with_exact_row() {
    let dir = tempfile::tempdir().unwrap();
    // probe ladder extended past the divergence floor; the exact value
    // check sits at n = 1024
    let mut entries = String::new();
    let mut expected = String::new();
    for (i, n) in [64u64, 256, 1024, 4096, 8192].iter().enumerate() {
        let nf = *n as f64;
        let t = 1.0 / (2.0 * nf.ln()).sqrt();
        if i > 0 {
            entries.push(',');
            expected.push(',');
        }
        entries.push_str(&format!(
            r#"{{"n": {n}, "time": {t:.17}, "frequency": [{n}]}}"#
        ));
        expected.push_str(&format!("{:.17}", nf.powf(0.6) - nf.sqrt() - 1.0));
    }
    let text = format!(
        r#"{{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {{
    "a2": {{"form": "named", "profile": "flat-exp-derivative", "scale": 1.0, "amplitude": [0.0, -1.0]}},
    "a1": [{{"form": "named", "profile": "flat-exp-derivative", "scale": 5.0, "amplitude": [0.0, 1.0]}}],
    "a0": {{"form": "poly", "coefficients": []}}
  }},
  "data": {{
    "initial": {{"kind": "gevrey", "delta": 1.0, "s": 2.0}},
    "forcing": {{"kind": "zero"}}
  }},
  "probe": {{
    "preset": "sequence",
    "label": "flat-profile-blowup",
    "entries": [{entries}],
    "expected_logmag": [{expected}],
    "nodes_per_unit": 64
  }}
}}"#
    );
    let spec = write(dir.path(), "spec.json", &text);
    let out_dir = dir.path().join("w");
    let out = bin()
        .arg("witness")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["classification"], "diverging");
    assert!(report["max_deviation"].as_f64().unwrap() < 1e-9 * 31.0);
    let csv = fs::read_to_string(out_dir.join("probe.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("1024,")).unwrap();
    let logmag: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((logmag - 31.0).abs() <= 1e-9 * 31.0);
}

#[test]
fn witness_parabolic_preset_bounded_for_heat() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "poly", "coefficients": [[0.0, -1.0]]},
    "a1": [{"form": "poly", "coefficients": []}],
    "a0": {"form": "poly", "coefficients": []}
  },
  "probe": {"preset": "parabolic", "t_star": 0.5, "n_values": [4, 8, 16, 32, 64], "nodes_per_unit": 256}
}"#;
    let spec = write(dir.path(), "spec.json", text);
    let out_dir = dir.path().join("w");
    let out = bin()
        .arg("witness")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["classification"], "bounded");
}

#[test]
fn witness_drift_preset_diverges_for_flat_leading() {
    let dir = tempfile::tempdir().unwrap();
    // leading part identically zero, drift imaginary part 1 on the horizon
    let text = r#"{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "poly", "coefficients": []},
    "a1": [{"form": "poly", "coefficients": [[0.0, 1.0]]}],
    "a0": {"form": "poly", "coefficients": []}
  },
  "probe": {"preset": "drift", "axis": 1, "varsigma": 1.0, "delta": 1.0,
            "n_values": [16, 32, 64, 128, 256, 512], "nodes_per_unit": 256}
}"#;
    let spec = write(dir.path(), "spec.json", text);
    let out = bin()
        .arg("witness")
        .arg(&spec)
        .arg("--out")
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["classification"], "diverging");
}

#[test]
fn solve_two_dimensional_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "dimension": 2,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "poly", "coefficients": [[0.0, -1.0]]},
    "a1": [{"form": "poly", "coefficients": []}, {"form": "poly", "coefficients": []}],
    "a0": {"form": "poly", "coefficients": []}
  },
  "data": {
    "initial": {"kind": "single-mode", "frequency": [1, 2], "amplitude": [1.0, 0.0]},
    "forcing": {"kind": "zero"}
  },
  "solve": {"times": [1.0], "truncation": 3, "nodes_per_unit": 64}
}"#;
    let spec = write(dir.path(), "spec.json", text);
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("field_t0.csv")).unwrap();
    assert!(csv.starts_with("xi_1,xi_2,logmag,phase\n"));
    assert_eq!(csv.lines().count(), 1 + 49); // 7 x 7 box
                                             // |xi|^2 = 5 damped over unit time
    let row = csv.lines().find(|l| l.starts_with("1,2,")).unwrap();
    assert!(row.contains("-5.0000000000000000e0"));
}

#[test]
fn witness_degenerate_preset_recovers_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
  "dimension": 1,
  "horizon": 1.0,
  "coefficients": {
    "a2": {"form": "factored",
           "zeros": [{"location": 0.5, "order": 4.0, "factor_sign": "negative"}],
           "remainder": [[0.0, -1.0]]},
    "a1": [{"form": "poly", "coefficients": [[0.0, 1.0]]}],
    "a0": {"form": "poly", "coefficients": []}
  },
  "structure": {
    "leading": {"kind": "degenerate",
                "zeros": [{"time": 0.5, "leading_order": 4.0, "drift_orders": [0.0]}]},
    "drifts": [{"kind": "degenerate-orders"}]
  },
  "probe": {"preset": "degenerate", "zero_index": 0,
            "n_values": [256, 512, 1024, 2048, 4096], "nodes_per_unit": 2048}
}"#;
    let spec = write(dir.path(), "spec.json", text);
    let out_dir = dir.path().join("w");
    let out = bin()
        .arg("witness")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["classification"], "diverging");
    let nu = report["nu_hat"].as_f64().unwrap();
    assert!((0.675..=0.825).contains(&nu), "nu_hat {nu}");
}

#[test]
fn solve_beyond_horizon_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = heat_solve_file(true).replace("\"times\": [1.0]", "\"times\": [2.0]");
    let spec = write(dir.path(), "spec.json", &text);
    let out = bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_cap_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(true));
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(&out_dir)
        .env("TORUS_CAUCHY_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    // outputs identical to the unconstrained run
    let unconstrained = dir.path().join("out2");
    bin()
        .arg("solve")
        .arg(&spec)
        .arg("--out")
        .arg(&unconstrained)
        .output()
        .unwrap();
    assert_eq!(
        fs::read(out_dir.join("field_t0.csv")).unwrap(),
        fs::read(unconstrained.join("field_t0.csv")).unwrap()
    );
}

#[test]
fn oracle_check_default_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(false));
    let out = bin().arg("oracle-check").arg(&spec).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(
        summary["compared"].as_u64().unwrap() + summary["overflowed"].as_u64().unwrap(),
        100
    );
}

#[test]
fn oracle_check_single_trial_heat() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(false));
    let out = bin()
        .arg("oracle-check")
        .arg(&spec)
        .arg("--trials")
        .arg("1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["pass"], true);
    assert!(summary["max_relative_error"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn oracle_check_coarse_nodes_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &heat_solve_file(false));
    let out = bin()
        .arg("oracle-check")
        .arg(&spec)
        .arg("--trials")
        .arg("20")
        .arg("--nodes-per-unit")
        .arg("4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("\"pass\": false"));
}

#[test]
fn fit_decay_round_trips_and_diagnoses() {
    let dir = tempfile::tempdir().unwrap();
    // synthetic s = 2, delta = 2 field
    let mut csv = String::from("xi_1,logmag,phase\n");
    for k in -256i64..=256 {
        if k == 0 {
            csv.push_str("0,0.0,0.0\n");
            continue;
        }
        let lm = -2.0 * (k.abs() as f64).sqrt();
        csv.push_str(&format!("{k},{lm:.17e},0.0\n"));
    }
    let field = write(dir.path(), "field.csv", &csv);
    let out = bin().arg("fit-decay").arg(&field).output().unwrap();
    assert!(out.status.success());
    let fit: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((fit["s_hat"].as_f64().unwrap() - 2.0).abs() <= 0.04);
    assert!((fit["delta_hat"].as_f64().unwrap() - 2.0).abs() <= 0.04);
    assert_eq!(fit["admissible"], true);

    // analytic decay
    let mut csv = String::from("xi_1,logmag,phase\n");
    for k in 1i64..=128 {
        csv.push_str(&format!("{k},{:.17e},0.0\n", -(k as f64)));
    }
    let field = write(dir.path(), "analytic.csv", &csv);
    let out = bin().arg("fit-decay").arg(&field).output().unwrap();
    assert!(out.status.success());
    let fit: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((fit["s_hat"].as_f64().unwrap() - 1.0).abs() <= 0.02);

    // growing magnitudes: inadmissible with a positive-slope diagnostic
    let mut csv = String::from("xi_1,logmag,phase\n");
    for k in 1i64..=64 {
        csv.push_str(&format!("{k},{:.17e},0.0\n", 0.5 * k as f64));
    }
    let field = write(dir.path(), "blowup.csv", &csv);
    let out = bin().arg("fit-decay").arg(&field).output().unwrap();
    assert!(out.status.success());
    let fit: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(fit["admissible"], false);
    assert!(fit["diagnostic"]
        .as_str()
        .unwrap()
        .contains("positive-slope"));
}
