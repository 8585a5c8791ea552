use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridsim"))
}

#[test]
fn simulate_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let st = bin()
        .args(["simulate", "--synthetic", "FDTD,request_count=500", "--platform", "ohm-wom"])
        .args(["--mode", "planar", "--format", "csv", "--seed", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("metric,value\n"));
    assert!(text.contains("seed,3"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "two_level_ratio = 12\n").unwrap();
    let run = |extra: &[&str]| {
        bin()
            .args(["simulate", "--synthetic", "FDTD,request_count=10", "--platform", "ohm-base", "--mode", "planar"])
            .args(extra)
            .output()
            .unwrap()
    };
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.trace");
    let o = bin()
        .args(["simulate", "--platform", "ohm-base", "--mode", "planar", "--trace"])
        .arg(&missing)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_every_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("m.toml"),
        "platforms = [\"ohm-base\", \"oracle\"]\nmodes = [\"two-level\"]\n\
         workloads = [\"sssp,request_count=300\"]\nseeds = [1, 2]\nout_dir = \"out\"\n",
    )
    .unwrap();
    let o = bin().args(["sweep", "--matrix"]).arg(dir.path().join("m.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 5);
    assert_eq!(fs::read_dir(dir.path().join("out")).unwrap().count(), 4);
}

#[test]
fn cost_and_calibration_print() {
    let o = bin().args(["cost", "--platform", "ohm-bw", "--mode", "planar"]).output().unwrap();
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("modulators 2176") && s.contains("detectors  3136"), "{s}");
    let o = bin().arg("calibrate-ber").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("wom-swap"));
}
