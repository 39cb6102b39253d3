//! End-to-end checks of the binary: artifact schemas, determinism, config
//! embedding, flag/file precedence, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn flocstat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flocstat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn steady_states_lists_verdicts_with_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = flocstat(
        &["steady-states", "--preset", "line3", "--sin", "5", "--d", "0.1"],
        dir.path(),
    );
    let doc = stdout_json(&out);
    let states = doc["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert_eq!(states[0]["kind"], "washout");
    assert_eq!(states[0]["stable"], false);
    assert_eq!(states[1]["kind"], "branch1");
    assert_eq!(states[1]["stable"], false);
    assert_eq!(states[1]["eigenvalues"].as_array().unwrap().len(), 3);
    // the embedded config carries the expanded preset
    assert_eq!(doc["config"]["params"]["m_u"], 3.25);
    assert_eq!(doc["config"]["args"]["s_in"], 5.0);
}

#[test]
fn trajectory_csv_has_header_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let out = flocstat(
        &[
            "simulate", "--preset", "line3", "--sin", "9", "--d", "0.1", "--t-end", "10",
            "--samples", "32", "--out", "traj.csv",
        ],
        dir.path(),
    );
    stdout_json(&out);
    let text = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let mut lines = text.lines();
    let config_line = lines.next().unwrap();
    assert!(config_line.starts_with("# config: "));
    assert_eq!(lines.next().unwrap(), "t,S,u,v");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 4);
    // numbers round-trip exactly
    let s: f64 = row[1].parse().unwrap();
    assert_eq!(format!("{s:.16e}"), row[1]);
    assert_eq!(text.lines().count(), 2 + 32);
}

#[test]
fn operating_diagram_artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "operating-diagram", "--preset", "line1", "--sin", "0:8", "--d", "0:5", "--grid",
        "20x20", "--out", "run",
    ];
    stdout_json(&flocstat(&args, dir.path()));
    let first: Vec<Vec<u8>> = ["run_grid.csv", "run_curves.csv", "run_points.csv", "run.svg"]
        .iter()
        .map(|name| std::fs::read(dir.path().join(name)).unwrap())
        .collect();
    stdout_json(&flocstat(&args, dir.path()));
    for (name, before) in ["run_grid.csv", "run_curves.csv", "run_points.csv", "run.svg"]
        .iter()
        .zip(&first)
    {
        let after = std::fs::read(dir.path().join(name)).unwrap();
        assert_eq!(&after, before, "{name} not byte-identical");
    }
}

#[test]
fn embedded_config_reparses_to_the_producing_config() {
    let dir = tempfile::tempdir().unwrap();
    stdout_json(&flocstat(
        &[
            "operating-diagram", "--preset", "line2", "--sin", "0:8", "--d", "0:1", "--grid",
            "10x10", "--out", "od",
        ],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("od_grid.csv")).unwrap();
    let config_line = text.lines().next().unwrap().strip_prefix("# config: ").unwrap();
    let doc: serde_json::Value = serde_json::from_str(config_line).unwrap();
    let params: flocstat_core::model::BioParams =
        serde_json::from_value(doc["params"].clone()).unwrap();
    assert_eq!(params, flocstat_core::model::BioParams::line2());
    assert_eq!(doc["args"]["grid"], serde_json::json!([10, 10]));
    // grid rows: header + 100 cells
    assert_eq!(text.lines().count(), 2 + 100);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scenario.toml"),
        "preset = \"line3\"\n[steady_states]\ns_in = 3.0\nd = 0.1\n",
    )
    .unwrap();
    let out = flocstat(
        &["steady-states", "--config", "scenario.toml", "--sin", "5"],
        dir.path(),
    );
    let doc = stdout_json(&out);
    assert_eq!(doc["config"]["args"]["s_in"], 5.0);
    assert_eq!(doc["config"]["args"]["d"], 0.1);
}

#[test]
fn bifurcation_emits_branches_and_events() {
    let dir = tempfile::tempdir().unwrap();
    let out = flocstat(
        &[
            "bifurcation", "--preset", "line3", "--d", "0.1", "--sin", "0:10", "--out", "bif",
        ],
        dir.path(),
    );
    stdout_json(&out);
    let events: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bif_events.json")).unwrap())
            .unwrap();
    let types: Vec<&str> = events["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["type"].as_str().unwrap())
        .collect();
    assert_eq!(types, ["LP", "H", "BP", "H"]);
    let branches = std::fs::read_to_string(dir.path().join("bif_branches.csv")).unwrap();
    assert!(branches.lines().nth(1).unwrap().starts_with("branch,kind,S_in,S,u,v,stable"));
    assert!(branches.contains("washout"));
    assert!(branches.contains("branch1"));
    assert!(branches.contains("branch2"));
}

#[test]
fn sweep_writes_per_pair_artifacts_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    stdout_json(&flocstat(
        &[
            "sweep", "--preset", "line3", "--pairs", "4:2,0:0", "--sin", "0:20", "--d",
            "0:3.5", "--grid", "30x30", "--out", "sw",
        ],
        dir.path(),
    ));
    assert!(dir.path().join("sw/a4_b2_grid.csv").exists());
    assert!(dir.path().join("sw/a4_b2.svg").exists());
    assert!(dir.path().join("sw/a0_b0_grid.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sw/summary.json")).unwrap())
            .unwrap();
    let entries = summary["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries[0]["i3_area"].as_f64().unwrap() > 0.0);
    assert_eq!(entries[1]["i3_area"].as_f64().unwrap(), 0.0);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    // unknown preset
    let out = flocstat(
        &["steady-states", "--preset", "line9", "--sin", "5", "--d", "0.1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    // missing required value
    let out = flocstat(&["bifurcation", "--preset", "line3", "--sin", "0:10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // malformed range
    let out = flocstat(
        &[
            "operating-diagram", "--preset", "line3", "--sin", "8:0", "--d", "0:1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // unknown key in the config file
    std::fs::write(dir.path().join("bad.toml"), "preset = \"line3\"\nnonsense = 1\n").unwrap();
    let out = flocstat(
        &["steady-states", "--config", "bad.toml", "--sin", "5", "--d", "0.1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // an initial condition far outside the admissible box diverges
    let out = flocstat(
        &[
            "simulate", "--preset", "line3", "--sin", "1", "--d", "0.1", "--init", "0.5,90,0.5",
            "--t-end", "10", "--out", "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numeric");
}
