use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

use qprivacy::channels::{dephasing, identity};
use qprivacy::io::{ChannelFile, EnsembleJson};
use qprivacy::qmath::binary_entropy;
use qprivacy::states::{DensityOperator, Ensemble, PureState};

fn qprivacy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprivacy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_file(file: &ChannelFile) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(file.to_json().as_bytes()).unwrap();
    f
}

#[test]
fn analyze_identity_with_orthogonal_ensemble() {
    let mut file = ChannelFile::from_channel(&identity(2).unwrap());
    file.ensemble = Some(EnsembleJson::from_ensemble(&Ensemble::computational_basis(2).unwrap()));
    let f = write_file(&file);
    let out = qprivacy(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let v = stdout_json(&out);
    assert!((v["chi_q"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["chi_e"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["identity_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn analyze_mixed_member_reports_null_residual() {
    let mut file = ChannelFile::from_channel(&dephasing(0.2).unwrap());
    let e = Ensemble::new(
        vec![0.5, 0.5],
        vec![
            qprivacy::states::Signal::Pure(PureState::plus()),
            qprivacy::states::Signal::Mixed(DensityOperator::maximally_mixed(2).unwrap()),
        ],
    )
    .unwrap();
    file.ensemble = Some(EnsembleJson::from_ensemble(&e));
    let f = write_file(&file);
    let out = qprivacy(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["identity_residual"].is_null());
}

#[test]
fn exit_codes_follow_contract() {
    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "[1, 2").unwrap();
    let f = write_file(&ChannelFile::from_channel(&identity(2).unwrap()));
    let cases: [(&[&str], i32); 8] = [
        (&["validate", f.path().to_str().unwrap()], 0),
        (&["validate", bad.path().to_str().unwrap()], 2),
        (&["analyze", f.path().to_str().unwrap()], 2),
        (&["sweep", "--family", "nope", "--from", "0", "--to", "1", "--steps", "2"], 2),
        (&["sweep", "--family", "erasure", "--from", "1", "--to", "0", "--steps", "2"], 2),
        (&["verify-identity", "--max-dim", "9"], 2),
        (&["frobnicate"], 2),
        (&["verify-identity", "--trials", "3", "--max-dim", "2"], 0),
    ];
    for (args, code) in cases {
        let out = qprivacy(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if code != 0 {
            assert!(out.stdout.is_empty());
            assert!(!out.stderr.is_empty());
        }
    }
}

#[test]
fn sweep_csv_is_plot_ready() {
    let out = qprivacy(&[
        "sweep", "--family", "dephasing", "--from", "0", "--to", "0.5", "--steps", "6", "--input-policy", "max-mixed",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = qprivacy::io::parse_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5].param, 0.5);
    for r in rows {
        assert!((r.coherent_info - (1.0 - binary_entropy(r.param).unwrap())).abs() < 1e-9);
    }
}

#[test]
fn optimize_is_byte_identical_for_fixed_seed() {
    let args = ["optimize", "--family", "amplitude_damping", "--param", "0.3", "--seed", "7", "--restarts", "4"];
    let a = qprivacy(&args);
    let b = qprivacy(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["restarts"].as_array().unwrap().len(), 4);
    assert!(v["converged"].is_boolean());
}

#[test]
fn optimize_from_file_and_family_agree() {
    let f = write_file(&ChannelFile::from_channel(&qprivacy::channels::erasure(0.25).unwrap()));
    let from_file = stdout_json(&qprivacy(&["optimize", f.path().to_str().unwrap(), "--restarts", "2"]));
    let from_family = stdout_json(&qprivacy(&["optimize", "--family", "erasure", "--param", "0.25", "--restarts", "2"]));
    assert_eq!(from_file["best_value"], from_family["best_value"]);
    assert!((from_file["best_value"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}
