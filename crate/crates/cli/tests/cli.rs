use std::path::Path;
use std::process::{Command, Output};

fn catgrav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catgrav")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn figure_writes_identical_files_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path, jobs: &str| {
        let o = catgrav(&["--jobs", jobs, "figure", "--id", "fig4d", "--out", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    };
    run(a.path(), "1");
    run(b.path(), "4");
    for name in ["fig4d.csv", "fig4d.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn table_prints_all_rows_as_json() {
    let o = catgrav(&["table1", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = rows.to_string();
    for scheme in ["S_S", "S_W", "S_1", "S_1^diss", "S_2", "S_2^diss"] {
        assert!(text.contains(&format!("\"{scheme}\"")), "{scheme} missing in {text}");
    }
}

#[test]
fn sweep_without_output_goes_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "sweep_quantity = \"s2\"\nsweep_variable = \"omega\"\nsweep_min = 6283.185307179586\nsweep_max = 62831.85307179586\nsweep_points = 4\n",
    )
    .unwrap();
    let o = catgrav(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "omega,s2");
    assert_eq!(data.len(), 5);
}

#[test]
fn damping_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gas.toml");
    std::fs::write(&cfg, "gas_pressure = 1e-5\n").unwrap();
    let o = catgrav(&["damping", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let q = r["quality_factor"].as_f64().unwrap();
    assert!(q > 1e8 && q < 1e9, "{q}");
}

#[test]
fn selftest_succeeds() {
    let o = catgrav(&["selftest"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "mass = -1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["figure", "--id", "fig9z"],
        vec!["sweep", "--config", "/nonexistent/sweep.toml"],
        vec!["table1", "--config", bad.to_str().unwrap()],
        vec!["sweep", "--config", bad.to_str().unwrap()],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = catgrav(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn missing_sweep_axis_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noaxis.toml");
    std::fs::write(&cfg, "mass = 1e-9\n").unwrap();
    let o =
        catgrav(&["figure", "--id", "fig2b", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));
}
