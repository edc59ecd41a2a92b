use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandnorm"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn norm_scan_csv_schema_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "N_list = [20]\ntrials = 1\nmaster_seed = 3\n",
    );
    let a = run(&["norm-scan", "--config", &cfg]);
    let b = run(&["norm-scan", "--config", &cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("experiment,ensemble,N,b,v,trial,seed,lmax,runtime_ms")
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..4], ["norm-scan", "GUE", "20", ""]);
    assert_eq!(first[5], "0");
    assert_eq!(first[8], "");
    assert_eq!(text.lines().count(), 1 + 1 + 3);
    assert!(!text.contains('\r'));
}

#[test]
fn seed_override_changes_output_and_seed_column_regenerates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "ensemble = \"BAND\"\nN_list = [12]\nb_list = [4]\ntrials = 2\n",
    );
    let a = String::from_utf8(run(&["norm-scan", "--config", &cfg, "--seed", "1"]).stdout).unwrap();
    let b = String::from_utf8(run(&["norm-scan", "--config", &cfg, "--seed", "2"]).stdout).unwrap();
    assert_ne!(a, b);
    let row: Vec<&str> = a.lines().nth(2).unwrap().split(',').collect();
    let seed = row[6];
    let by_trial = run(&["sample", "--config", &cfg, "--seed", "1", "--trial", "1"]);
    let by_seed = run(&[
        "sample",
        "--config",
        &cfg,
        "--seed",
        "1",
        "--trial-seed",
        seed,
    ]);
    let entries = |o: &Output| -> Vec<String> {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').skip(6).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert!(!entries(&by_trial).is_empty());
    assert_eq!(entries(&by_trial), entries(&by_seed));
}

#[test]
fn config_errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "N_list = [8]\ntrails = 3\n");
    let o = run(&["norm-scan", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
    let bad_grid = write(
        dir.path(),
        "g.toml",
        "ensemble = \"BAND\"\nN_list = [8]\nb_list = [16]\n",
    );
    assert_eq!(
        run(&["norm-scan", "--config", &bad_grid]).status.code(),
        Some(2)
    );
    let o = run(&[
        "norm-scan",
        "--config",
        &write(dir.path(), "ok.toml", "N_list = [4]\ntrials = 1\n"),
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn moments_exact_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "N_list = [4]\nk_max = 8\nformat = \"json\"\n",
    );
    let o = run(&["moments", "--config", &cfg]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let limit: Vec<&str> = rows
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["kind"] == "LIMIT")
        .map(|r| r["exact"].as_str().unwrap())
        .collect();
    assert_eq!(limit, ["1", "1", "2", "5", "14"]);
    let finite = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["kind"] == "FINITE_N" && r["order"] == 4)
        .unwrap();
    assert_eq!(finite["exact"], "33/16");
    let o = run(&[
        "moments", "--config", &cfg, "--mode", "wick", "--format", "csv",
    ]);
    assert!(String::from_utf8(o.stdout).unwrap().contains(",33/16\n"));
}

#[test]
fn verify_gate_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "N_list = [64]\nk_max = 8\ntrials = 4000\neps_list = [0.3]\n",
    );
    let out = dir.path().join("v.json");
    let o = run(&[
        "verify",
        "--config",
        &cfg,
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(report
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == "true"));
    let o = run(&[
        "verify",
        "--config",
        &cfg,
        "--suite",
        "identities",
        "--inject-diagonal-fault",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
    let small = write(dir.path(), "s.toml", "N_list = [8]\nk_max = 8\n");
    assert_eq!(
        run(&["verify", "--config", &small, "--suite", "bounds"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn semicircle_table() {
    let o = run(&["semicircle", "--trials", "1", "--config", "/dev/null"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("experiment,ensemble,N,b,v,kind,index,lo,hi,center,value,reference\n"));
    assert_eq!(
        text.lines().filter(|l| l.contains(",hist,")).count(),
        2 * 80
    );
}
