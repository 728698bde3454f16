use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stimdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stimdyn")).args(args).output().expect("binary runs")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn list_has_every_scenario_in_a_fixed_order() {
    let out = stimdyn(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(
        names,
        [
            "free-wp",
            "spon-decay",
            "stim-early",
            "stim-late",
            "double-pulse",
            "phase-scan",
            "semiclassical-compare",
            "perturbative-breakdown",
            "fel-rates",
            "synchrotron-rates",
        ]
    );
    assert!(text.lines().all(|l| l.contains("Fig") || l.contains("Sec")));
    assert_eq!(stimdyn(&["list"]).stdout, text.as_bytes());
}

#[test]
fn identical_configs_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = stimdyn(&[
            "run",
            "stim-early",
            "--set",
            "integration.t_end=20",
            "--set",
            "observables.t_ref=20",
            "--set",
            "observables.snapshots=[10.0]",
            "--set",
            "observables.grid_points=512",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "population.csv"));
    for name in names {
        if name == "manifest.json" {
            continue;
        }
        let (x, y) = (fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        assert!(x == y, "{name:?} differs between runs");
    }
}

#[test]
fn manifest_echoes_the_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = stimdyn(&[
        "run",
        "fel-rates",
        "--set",
        "nuclear.scan_points=4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "fel-rates");
    assert_eq!(manifest["config"]["nuclear"]["scan_points"], 4);
    assert_eq!(manifest["config"]["pulses"]["duration"], 1e-13);
    let files: Vec<&str> =
        manifest["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    for f in ["config.toml", "summary.json", "report.json", "decay_curves.csv", "delta_d_scan.csv"] {
        assert!(files.contains(&f), "{f} missing from {files:?}");
    }
    // the echoed config can be fed straight back in
    let again = tmp.path().join("again");
    let cfg = tmp.path().join("config.toml");
    let out =
        stimdyn(&["run", "fel-rates", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(tmp.path().join("summary.json")).unwrap(),
        fs::read(again.join("summary.json")).unwrap()
    );
}

#[test]
fn fel_rates_at_pi_is_stimulated_emission() {
    let tmp = tempfile::tempdir().unwrap();
    let out = stimdyn(&[
        "run",
        "fel-rates",
        "--phi",
        "3.14159",
        "--set",
        "nuclear.scan_points=4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s = summary(tmp.path());
    assert!(s["delta_d"].as_f64().unwrap() > 0.0);
    assert_eq!(s["verdict"], "stimulated emission");
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = stimdyn(&["run", "free-wp", "--set", "integration.bogus=1", "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integration.bogus"));

    let out = stimdyn(&["run", "free-wp", "--set", "nuclear.step=0.1", "--out", dir]);
    assert_eq!(out.status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[cavity]\nmodes = \"many\"\n").unwrap();
    let out = stimdyn(&["run", "spon-decay", "--config", bad.to_str().unwrap(), "--out", dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cavity.modes"));

    assert_eq!(stimdyn(&["run", "no-such-scenario"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = stimdyn(&[
        "run",
        "spon-decay",
        "--set",
        "integration.dt=1.0",
        "--set",
        "integration.t_end=5",
        "--out",
        dir,
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = stimdyn(&[
        "run",
        "spon-decay",
        "--set",
        "integration.norm_tolerance=1e-18",
        "--set",
        "integration.t_end=5",
        "--out",
        dir,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("retry with dt"));
}

#[test]
fn dump_amplitudes_adds_a_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = stimdyn(&[
        "run",
        "spon-decay",
        "--set",
        "integration.t_end=10",
        "--set",
        "observables.snapshots=[5.0]",
        "--dump-amplitudes",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut r = csv::Reader::from_path(tmp.path().join("amplitudes.csv")).unwrap();
    let total: f64 = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            let (re, im): (f64, f64) = (rec[3].parse().unwrap(), rec[4].parse().unwrap());
            re * re + im * im
        })
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}
