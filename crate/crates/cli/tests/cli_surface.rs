//! End-to-end checks of the binary surface: subcommands, file formats,
//! exit codes, and determinism of fixed-step runs.

use std::path::Path;
use std::process::{Command, Output};

fn hcf_lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcf-lab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn families_list_mentions_constructors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["families", "list"], tmp.path());
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in [
        "sl(m)",
        "heisenberg(m)",
        "mu-infinity(n)",
        "perfect-double",
        "nu-ab",
    ] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
}

#[test]
fn export_then_audit_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["families", "export", "sl(3)", "--out", "art"], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let apath = tmp.path().join("art/sl_3.algebra.json");
    let mpath = tmp.path().join("art/sl_3.metric.json");
    assert!(apath.exists() && mpath.exists());

    // audit from the exported files: sl(3) with the trace form is static
    let out = hcf_lab(
        &[
            "audit",
            "art/sl_3.algebra.json",
            "--metric",
            "art/sl_3.metric.json",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict static"), "{text}");
    assert!(text.contains("static: λ = 3.000000000"), "{text}");
    assert!(text.contains("perfect algebra: true"), "{text}");
}

#[test]
fn audit_family_specs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(
        &["audit", "heisenberg(1)+random", "--seed", "11"],
        tmp.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict algebraic"));

    let out = hcf_lab(&["audit", "perfect-double(sl2):t=1"], tmp.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict semi_algebraic"));

    // generic orbit point: no soliton structure
    let out = hcf_lab(&["audit", "perfect-double(sl2):t=0.5"], tmp.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("verdict none"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["audit", "exceptional(8)"], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    // malformed algebra file
    std::fs::write(tmp.path().join("bad.json"), "{\"format\": \"hcf-lab/1\"}").unwrap();
    let out = hcf_lab(&["audit", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    // non-Lie tensor: c^3_{12} and c^1_{13} both set breaks Jacobi
    let bad = serde_json::json!({
        "format": "hcf-lab/1",
        "dim": 3,
        "constants": [
            {"i": 0, "j": 1, "k": 2, "re": 1.0, "im": 0.0},
            {"i": 0, "j": 2, "k": 0, "re": 1.0, "im": 0.0},
        ],
    });
    std::fs::write(tmp.path().join("notlie.json"), bad.to_string()).unwrap();
    let out = hcf_lab(&["audit", "notlie.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Jacobi"));

    // instability experiment rejects starts outside the region
    let out = hcf_lab(
        &["sln-instability", "--y0", "0.2", "--z0", "0.9"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the invariant region"));
}

#[test]
fn reduced_flow_rk4_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "flow-reduced",
        "--system",
        "yz",
        "--n",
        "2",
        "--y0",
        "0.9",
        "--z0",
        "0.8",
        "--integrator",
        "rk4",
        "--t-max",
        "1.0",
    ];
    let out1 = hcf_lab(&[&args[..], &["--out", "run1"]].concat(), tmp.path());
    let out2 = hcf_lab(&[&args[..], &["--out", "run2"]].concat(), tmp.path());
    assert!(out1.status.success() && out2.status.success());
    let a = std::fs::read(tmp.path().join("run1/reduced_trace.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("run2/reduced_trace.csv")).unwrap();
    assert_eq!(a, b, "fixed-step traces must be byte-identical");
    let header = String::from_utf8_lossy(&a);
    assert!(header.starts_with("t,y,z"));
}

#[test]
fn xyz_flow_reports_blowup_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(
        &[
            "flow-reduced",
            "--system",
            "xyz",
            "--n",
            "2",
            "--y0",
            "0.9",
            "--z0",
            "0.9",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let t_est = v["blowup"]["t_est"].as_f64().unwrap();
    let upper = v["blowup"]["bounds"][1].as_f64().unwrap();
    assert!(t_est <= upper + 1e-6);
}

#[test]
fn flow_metric_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(
        &["flow-metric", "sl(2)", "--t-max", "0.2", "--out", "flow"],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("flow/metric_trace.csv")).unwrap();
    assert!(csv
        .lines()
        .next()
        .unwrap()
        .starts_with("t,H_0_0_re,H_0_0_im"));
    let events = std::fs::read_to_string(tmp.path().join("flow/metric_trace.events.json")).unwrap();
    assert!(events.contains("max_time_reached"));
}

#[test]
fn acceptance_subcommand_reports_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["acceptance", "--out", "acc"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("12/12 criteria passed"), "{text}");
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("acc/acceptance_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["passed"], 12);
}

#[test]
fn sln_instability_reports_full_story() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(
        &[
            "sln-instability",
            "--n",
            "2",
            "--y0",
            "0.99",
            "--z0",
            "0.99",
            "--out",
            "exp",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let json_start = text.find('{').expect("report JSON present");
    let v: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(v["region_membership_persistent"], true);
    assert_eq!(v["converged_to_origin"], true);
    assert!(v["ratio_deviation_at_floor"].as_f64().unwrap() <= 1e-4);
    assert_eq!(v["bracket_converged"], true);
    assert_eq!(v["blowup"]["within_upper"], true);
    assert_eq!(v["blowup"]["envelope_ok"], true);
    assert!(tmp.path().join("exp/yz_trace.csv").exists());
    assert!(tmp.path().join("exp/xyz_trace.csv").exists());
    assert!(tmp.path().join("exp/instability_report.json").exists());
    // the CSV carries the derived ratio column
    let csv = std::fs::read_to_string(tmp.path().join("exp/yz_trace.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("z2_over_y"));
}

#[test]
fn over_tightened_acceptance_fails_with_code_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["acceptance", "--tighten", "1e-9"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn homothety_and_orbit_drift_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hcf_lab(&["homothety", "--format", "csv"], tmp.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("distinct: true"), "{text}");

    let out = hcf_lab(
        &[
            "orbit-drift",
            "--a0",
            "1.0",
            "--b0",
            "0.05",
            "--t-max",
            "12",
            "--format",
            "csv",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("attractor: nu_plus"), "{text}");

    // exactly on the ray there is nothing to drift to
    let out = hcf_lab(
        &[
            "orbit-drift",
            "--a0",
            "1.0",
            "--b0",
            "0.0",
            "--t-max",
            "2",
            "--format",
            "csv",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("attractor: nu_0"));
}
