//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swe-dgsem"))
}

#[test]
fn run_lists_scenarios() {
    let out = bin().args(["run", "--list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dam_break_flat"));
    assert!(text.contains("parabolic_dam"));
}

#[test]
fn run_scenario_writes_diagnostics() {
    let dir = std::env::temp_dir().join("swe_dgsem_cli_test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = bin()
        .args([
            "run",
            "--scenario",
            "lake_at_rest_discontinuous",
            "--n",
            "3",
            "--tend",
            "0.01",
            "--fields",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = dir.join("lake_at_rest_discontinuous_diagnostics.csv");
    assert!(csv.exists());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,mass,momx,momy,energy,minh,l2H"));
    assert!(dir.join("lake_at_rest_discontinuous_final.dat").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn run_with_config_file_and_flag_override() {
    let dir = std::env::temp_dir().join("swe_dgsem_cli_cfg_test");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "[run]\nscenario = lake_at_rest_discontinuous\nn = 4\ntend = 0.5\n\n[output]\nevery = 0\n",
    )
    .unwrap();
    let out = bin()
        .arg("run")
        .arg(&cfg)
        .args(["--tend", "0.002", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2 steps"), "stdout: {text}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn mesh_gen_and_check_round_trip() {
    let dir = std::env::temp_dir().join("swe_dgsem_cli_mesh_test");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mesh.txt");
    let out = bin()
        .args(["mesh", "gen"])
        .arg(&path)
        .args(["--nx", "3", "--ny", "2", "--n", "4", "--curved", "0.04"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(Path::new(&path).exists());

    let out = bin().args(["mesh", "check"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("elements 6"), "stdout: {text}");
    assert!(text.contains("metric identity residual"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_single_fast_criterion() {
    let out = bin().args(["verify", "--criterion", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion  1"));
    assert!(text.contains("PASS"));
}

#[test]
fn unknown_scenario_fails_with_nonzero_exit() {
    let out = bin()
        .args(["run", "--scenario", "not_a_scenario"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8(out.stderr).unwrap();
    assert!(text.contains("unknown scenario"));
}
