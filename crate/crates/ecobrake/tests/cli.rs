//! Black-box tests of the `plan` binary: exit codes, file outputs, CSV
//! format, and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/case_study.toml")
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn plan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn case_study_toml() -> String {
    fs::read_to_string(scenario_path()).unwrap()
}

#[test]
fn both_methods_verify_cleanly() {
    let dir = tmp("happy");
    let traj = dir.join("traj.csv");
    let report = dir.join("report.txt");
    let out = plan(&[
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--method",
        "both",
        "--verify",
        "--quiet",
        "--out-traj",
        traj.to_str().unwrap(),
        "--out-report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // With --method both the method name lands in the trajectory filename.
    for name in ["traj.indirect.csv", "traj.direct.csv"] {
        let csv = fs::read_to_string(dir.join(name)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t_s,mode,s_m,v_ms,a_ms2,u_ms2,lambda_v");
        assert!(lines.all(|l| {
            let mode = l.split(',').nth(1).unwrap();
            matches!(mode, "q1" | "q2" | "q3")
        }));
    }
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("comparison:"), "missing comparison section:\n{text}");
}

#[test]
fn outputs_are_deterministic() {
    let mut reports = Vec::new();
    let mut trajs = Vec::new();
    for run in ["det1", "det2"] {
        let dir = tmp(run);
        let traj = dir.join("t.csv");
        let report = dir.join("r.txt");
        let out = plan(&[
            "--scenario",
            scenario_path().to_str().unwrap(),
            "--method",
            "both",
            "--quiet",
            "--out-traj",
            traj.to_str().unwrap(),
            "--out-report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        reports.push(fs::read(report).unwrap());
        trajs.push(fs::read(dir.join("t.indirect.csv")).unwrap());
    }
    assert_eq!(reports[0], reports[1], "report not bit-identical across runs");
    assert_eq!(trajs[0], trajs[1], "trajectory not bit-identical across runs");
}

#[test]
fn inverted_boundary_exits_1_and_names_the_field() {
    let dir = tmp("badcfg");
    let path = dir.join("inverted.toml");
    fs::write(
        &path,
        case_study_toml().replace("vf_kmh = 100.0", "vf_kmh = 200.0"),
    )
    .unwrap();
    let out = plan(&["--scenario", path.to_str().unwrap(), "--method", "indirect"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("boundary.vf"), "stderr: {err}");
}

#[test]
fn missing_scenario_file_exits_1() {
    let out = plan(&["--scenario", "/nonexistent/zzz.toml", "--method", "direct"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weak_brake_bound_exits_2() {
    // u_min = -0.5 m/s^2 cannot shed the required speed within the distance.
    let dir = tmp("weak");
    let path = dir.join("weak.toml");
    fs::write(
        &path,
        case_study_toml().replace("u_min_ms2 = -2.0", "u_min_ms2 = -0.5"),
    )
    .unwrap();
    let out = plan(&["--scenario", path.to_str().unwrap(), "--method", "direct"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn loose_solver_tolerances_fail_verification_with_exit_3() {
    // Solve "successfully" to a sloppy tolerance, then let --verify catch it.
    let dir = tmp("loose");
    let path = dir.join("loose.toml");
    fs::write(
        &path,
        format!(
            "{}\n[solver]\nnewton_tol = 1e-2\nnewton_max_iters = 3\n",
            case_study_toml()
        ),
    )
    .unwrap();
    let out = plan(&[
        "--scenario",
        path.to_str().unwrap(),
        "--method",
        "indirect",
        "--verify",
        "--quiet",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("verification failed"), "stderr: {err}");
}

#[test]
fn bad_dt_exits_1() {
    let out = plan(&[
        "--scenario",
        scenario_path().to_str().unwrap(),
        "--method",
        "indirect",
        "--dt=-0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--dt"), "stderr: {err}");
}
