use std::io::Write;

use super::*;
use crate::Error;

/// Four-qubit chain, three times, nine phases, three masks; `overrides` is
/// a JSON object merged on top.
fn small(overrides: &str) -> ExperimentConfig {
    let mut base = serde_json::json!({"graph": "chain4", "times_ns": [0, 30, 60], "phis": {"count": 9}, "n_mask_sets": 3});
    let extra: serde_json::Value = serde_json::from_str(if overrides.is_empty() { "{}" } else { overrides }).unwrap();
    for (k, v) in extra.as_object().unwrap() {
        base[k] = v.clone();
    }
    parse_config(&base.to_string()).unwrap()
}

#[test]
fn minimal_config_takes_defaults() {
    let c = parse_config(r#"{"graph": "n6", "seed": 1}"#).unwrap();
    assert_eq!(c.j_mhz, 3.0);
    assert_eq!(c.phis().unwrap().len(), 41);
    let t = c.times().unwrap();
    assert_eq!(t.len(), 21);
    assert_eq!((t[0], t[1], t[20]), (0.0, 8.0, 160.0));
    assert_eq!(c.n_mask_sets, 10);
    assert_eq!(c.protocol_spec().unwrap().masks.len(), 10);
    assert_eq!(parse_config("{}").unwrap(), ExperimentConfig::default());
}

#[test]
fn unknown_key_is_named() {
    let err = parse_config(r#"{"graph": "n6", "foo": 2}"#).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(err.to_string().contains("foo"), "{err}");
    assert!(err.to_string().contains("line 1"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn validation_errors() {
    for bad in [
        r#"{"times_ns": []}"#,
        r#"{"times_ns": {"start": 10, "stop": 0, "step": 1}}"#,
        r#"{"times_ns": [-1]}"#,
        r#"{"phis": []}"#,
        r#"{"j_mhz": 0}"#,
        r#"{"n_mask_sets": 0}"#,
        r#"{"graph": "hexagon"}"#,
        r#"{"graph": {"n_qubits": 3, "edges": [[0, 1], [1, 2], [2, 0]]}}"#,
        r#"{"graph": "n6", "center": 6}"#,
        r#"{"noise": "loud"}"#,
        r#"{"graph": "chain11", "noise": "table1"}"#,
        r#"{"trotter_dt_ns": -1}"#,
    ] {
        let err = parse_config(bad).expect_err(bad);
        assert_eq!(err.exit_code(), 2, "{bad}: {err}");
    }
}

#[test]
fn explicit_graph_center_and_noise() {
    let c = parse_config(r#"{"graph": {"n_qubits": 3, "edges": [[0, 1], [1, 2]]}, "noise": "table1"}"#).unwrap();
    let g = c.graph().unwrap();
    assert_eq!(g.center(), 1);
    assert_eq!(c.noise_model(&g).unwrap().unwrap().n_qubits(), 3);
    let c = parse_config(r#"{"graph": "chain3", "center": 0, "noise": "none"}"#).unwrap();
    let g = c.graph().unwrap();
    assert_eq!(g.center(), 0);
    assert!(c.noise_model(&g).unwrap().is_none());
    let model = r#"{"qubits": [{"t1_us": 30, "t2_us": 10, "f_gg": 0.95, "f_ee": 0.9}], "slice_ns": 2}"#;
    let c = parse_config(&format!(r#"{{"graph": "single", "noise": {model}}}"#)).unwrap();
    assert_eq!(c.noise_model(&c.graph().unwrap()).unwrap().unwrap().slice_ns, 2.0);
}

#[test]
fn time_grids() {
    let g = TimeGrid::Range(TimeRange { start: 0.0, stop: 1.0, step: 0.1 });
    assert_eq!(g.values().unwrap().len(), 11);
    let c = parse_config(r#"{"times_ns": [0, 30, 60], "phis": [0.5]}"#).unwrap();
    assert_eq!(c.times().unwrap(), vec![0.0, 30.0, 60.0]);
    assert_eq!(c.phis().unwrap(), vec![0.5]);
}

#[test]
fn schema_lists_every_field() {
    let schema: serde_json::Value = serde_json::from_str(CONFIG_SCHEMA).unwrap();
    let mut in_schema: Vec<String> = schema["properties"].as_object().unwrap().keys().cloned().collect();
    let config = serde_json::to_value(ExperimentConfig::default()).unwrap();
    let mut in_struct: Vec<String> = config.as_object().unwrap().keys().cloned().collect();
    in_schema.sort();
    in_struct.sort();
    assert_eq!(in_schema, in_struct);
}

#[test]
fn config_hash_tracks_content_not_output_location() {
    let a = ExperimentConfig::default();
    let b = ExperimentConfig { out_dir: Some("elsewhere".into()), ..a.clone() };
    let c = ExperimentConfig { seed: 2, ..a.clone() };
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn otoc_table_at_zero_time() {
    let c = small("");
    let t = cmd_otoc(&c, Some(1)).unwrap();
    let center = c.graph().unwrap().center();
    for row in t.rows.iter().filter(|r| r[0] == Value::Float(0.0)) {
        let expected = if row[1] == Value::from(center) { -1.0 } else { 1.0 };
        assert!((row[3].as_f64().unwrap() - expected).abs() < 1e-12);
        assert_eq!(row[5], Value::from(3usize));
    }
    assert_eq!(t.rows.len(), 3 * 4);
}

#[test]
fn sense_table_at_zero_time_is_ramsey() {
    for (sign, s) in [("+", -1.0), ("-", 1.0)] {
        let c = small(&format!(r#"{{"lv_sign": "{sign}"}}"#));
        let t = cmd_sense(&c, None).unwrap();
        for row in t.rows.iter().filter(|r| r[1] == Value::Float(0.0)) {
            let phi = row[2].as_f64().unwrap();
            assert!((row[3].as_f64().unwrap() - s * phi.sin()).abs() < 1e-9, "{row:?}");
        }
    }
}

#[test]
fn sensitivity_table() {
    let t = cmd_sensitivity(&small(""), None).unwrap();
    let otoc = t.column_f64("eta_inv_otoc").unwrap();
    assert!((otoc[0] - 1.0).abs() < 1e-12);
    let raw = t.column_f64("eta_inv_raw").unwrap();
    let norm = t.column_f64("eta_inv_norm").unwrap();
    // nine phases leave only the central difference of −sin φ at t = 0
    let h = std::f64::consts::PI / 4.0;
    assert!((raw[0] - h.sin() / h).abs() < 1e-9, "{}", raw[0]);
    for (r, n) in raw.iter().zip(&norm) {
        assert!((r - n).abs() < 1e-9);
    }
}

#[test]
fn sensitivity_without_zero_phase_identifies_the_point() {
    let c = small(r#"{"phis": [-0.2, -0.1, 0.1, 0.2]}"#);
    let err = cmd_sensitivity(&c, None).unwrap_err();
    assert!(matches!(err, Error::Point { index: 0, .. }), "{err}");
}

#[test]
fn gme_table() {
    let t = cmd_gme(&small(""), None).unwrap();
    let c = t.column_f64("c_gme").unwrap();
    assert!(c[0].abs() < 1e-9);
    assert!(c.iter().all(|v| *v >= 0.0));
    assert!(c[1] > 0.0);
}

#[test]
fn csv_bytes_are_deterministic() {
    let c = small("");
    let a = cmd_sense(&c, Some(1)).unwrap().to_csv().unwrap();
    let b = cmd_sense(&c, Some(3)).unwrap().to_csv().unwrap();
    assert_eq!(a, b);
    assert!(a.contains(&format!("# config_sha256={}", c.hash())));
    assert!(!a.contains('\r'));
}

#[test]
fn noisy_sweeps_run_and_are_deterministic() {
    let c = small(r#"{"noise": "table1", "n_trajectories": 40, "times_ns": [0, 40], "phis": [-0.2, -0.1, 0, 0.1, 0.2]}"#);
    let a = cmd_sensitivity(&c, Some(1)).unwrap();
    let b = cmd_sensitivity(&c, Some(2)).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert!(a.metadata.iter().any(|(k, v)| k == "noise" && v == "40 trajectories"));
    let otoc = cmd_otoc(&c, None).unwrap();
    assert!(otoc.column_f64("otoc_mean").unwrap().iter().all(|v| v.abs() <= 1.0 + 1e-9));
}

fn csv_file(header: &str, rows: impl Iterator<Item = (f64, f64)>) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# synthetic\n{header}").unwrap();
    for (a, b) in rows {
        writeln!(f, "{a},{b}").unwrap();
    }
    f
}

#[test]
fn calibrate_chevron_and_zgate() {
    let j = crate::engine::mhz_to_rad_per_ns(3.0);
    let f = csv_file("t_ns,population", (0..200).map(|k| 2.0 * k as f64).map(|t| (t, (2.0 * j * t).cos().powi(2))));
    let report = cmd_calibrate(CalibrationKind::Chevron, f.path(), &ExperimentConfig::default(), &[]).unwrap();
    assert!((report.result["j_mhz"].as_f64().unwrap() - 3.0).abs() < 0.03);
    assert_eq!(report.n_samples, 200);

    let f = csv_file("z_amp, phi_rad", (0..8).map(|k| k as f64 / 7.0).map(|z| (z, 2.0 * z + z * z)));
    let report = cmd_calibrate(CalibrationKind::Zgate, f.path(), &ExperimentConfig::default(), &[1.0]).unwrap();
    let z = report.result["inverse"][0]["z_amp"].as_f64().unwrap();
    assert!((2.0 * z + z * z - 1.0).abs() < 1e-6);

    let f = csv_file("t_ns,wrong", std::iter::once((0.0, 0.0)));
    let err = cmd_calibrate(CalibrationKind::Chevron, f.path(), &ExperimentConfig::default(), &[]).unwrap_err();
    assert!(err.to_string().contains("population"));
}
