//! End-to-end tests of the `wkey` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wkey(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wkey"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn construct_writes_a_parsable_dump_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &["construct", "--n", "3", "--d", "2", "--out", "rho.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let summary = stdout(&out);
    assert!(summary.contains("side=512"));
    assert!(summary.contains("trace=1.00000000000e0"));
    assert!(summary.contains("min_eigenvalue="));

    let dump: wkey_core::json::OperatorDump =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rho.json")).unwrap()).unwrap();
    assert_eq!(dump.dims, vec![2, 2, 2, 2, 2, 2, 2, 2, 2]);
    let op = dump.to_operator::<f64>().unwrap();
    assert!((op.trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn construct_pair_reduction_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "construct",
            "--n",
            "3",
            "--d",
            "2",
            "--pair",
            "1,2",
            "--out",
            "red.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("side=256"));
}

#[test]
fn construct_with_unitary_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let u = wkey_core::family::HermitianUnitary::<f64>::hadamard_power(1).unwrap();
    let dump = wkey_core::json::UnitaryDump::from_unitary(&u);
    fs::write(
        dir.path().join("u.json"),
        serde_json::to_string(&dump).unwrap(),
    )
    .unwrap();
    let a = wkey(
        &[
            "construct",
            "--n",
            "3",
            "--unitary",
            "u.json",
            "--out",
            "a.json",
        ],
        dir.path(),
    );
    assert!(a.status.success());
    let b = wkey(
        &["construct", "--n", "3", "--d", "2", "--out", "b.json"],
        dir.path(),
    );
    assert!(b.status.success());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn construct_rejects_unsupported_dimension_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &["construct", "--n", "3", "--d", "3", "--out", "x.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("no built-in unitary"), "stderr: {err}");
}

#[test]
fn ppt_check_accepts_a_unitary_file() {
    let dir = tempfile::tempdir().unwrap();
    let u = wkey_core::family::HermitianUnitary::<f64>::hadamard_power(1).unwrap();
    let dump = wkey_core::json::UnitaryDump::from_unitary(&u);
    fs::write(
        dir.path().join("u.json"),
        serde_json::to_string(&dump).unwrap(),
    )
    .unwrap();
    let out = wkey(
        &["ppt-check", "--n", "3", "--unitary", "u.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn construct_refuses_oversized_requests() {
    let dir = tempfile::tempdir().unwrap();
    // side 8 * 4^6 = 32768 exceeds the default dense limit
    let out = wkey(
        &["construct", "--n", "3", "--d", "4", "--out", "x.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(
        err.contains("exceeds the dense size limit"),
        "stderr: {err}"
    );
}

#[test]
fn ppt_check_family_passes_and_w_projector_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(&["ppt-check", "--n", "3", "--d", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.ends_with("PPT")));

    let w = wkey(
        &["construct", "--n", "3", "--w-state", "--out", "w.json"],
        dir.path(),
    );
    assert!(w.status.success());
    let out = wkey(&["ppt-check", "--input", "w.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().all(|l| l.ends_with("NPT")));
}

#[test]
fn ppt_check_single_party_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &["ppt-check", "--n", "3", "--d", "2", "--party", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("party 2:"));
}

#[test]
fn sweep_random_csv_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "sweep-random",
            "--d-grid",
            "2:4:2",
            "--m-grid",
            "1:2:1",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "D,M,q,i_ab,i_ae,rate,rate_clamped");
    assert_eq!(lines.len(), 5);
    // q(2, 1) = 23/144
    assert!(lines[1].starts_with("2,1,1.59722222222e-1,"));
    assert!(text.ends_with('\n'));
}

#[test]
fn sweep_csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep-filter",
        "--n",
        "3",
        "--d-grid",
        "100:1000:100",
        "--eps-grid",
        "0.05:0.95:0.05",
        "--out",
    ];
    let mut bytes = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "2"), ("c.csv", "1")] {
        let mut full: Vec<&str> = args.to_vec();
        full.push(name);
        let out = Command::new(env!("CARGO_BIN_EXE_wkey"))
            .args(&full)
            .env("RAYON_NUM_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        bytes.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
}

#[test]
fn sweep_formats_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "sweep-random",
            "--d-grid",
            "2:10:4",
            "--m-grid",
            "1:3:1",
            "--out",
            "r.json",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 9);

    let out = wkey(
        &[
            "sweep-random",
            "--d-grid",
            "2:10:4",
            "--m-grid",
            "1:3:1",
            "--out",
            "r.svg",
            "--format",
            "svg",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let svg = fs::read_to_string(dir.path().join("r.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn thresholds_command_reports_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "thresholds",
            "--mode",
            "random",
            "--m",
            "100",
            "--d-grid",
            "2:200:1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "threshold D = 90");

    let out = wkey(
        &[
            "thresholds",
            "--mode",
            "random",
            "--m",
            "1",
            "--d-grid",
            "2:10:1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "no threshold in range");
}

#[test]
fn multikey_bounds_and_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "multikey",
            "--rate",
            "0.1",
            "--n",
            "5",
            "--rates",
            "0.1,0.1,0.1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("chain bound: 2.50000000000e-2"));
    assert!(text.contains("triangle bound: 1.50000000000e-1"));

    let out = wkey(&["multikey", "--rates", "1,1,2.5"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = wkey(
        &[
            "sweep-random",
            "--d-grid",
            "10:2:1",
            "--m-grid",
            "1",
            "--out",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
