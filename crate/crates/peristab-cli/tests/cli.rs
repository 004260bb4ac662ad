//! End-to-end runs of the binary: config parsing, output files, metadata
//! echo, exit codes, and rerun determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_peristab"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("peristab_cli_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.txt");
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn help_and_unknown_command() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("stability-map"));

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_config_key_is_a_configuration_error() {
    let dir = tmp_dir("badkey");
    let cfg = write_config(&dir, "[stability-map]\nbogus = 1\n");
    let out = run(&[
        "stability-map",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn verify_writes_passing_table() {
    let dir = tmp_dir("verify");
    let out_dir = dir.join("out");
    let out = run(&["verify", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(out_dir.join("verify.csv")).unwrap();
    let mut rows = table.lines();
    assert_eq!(rows.next().unwrap(), "check,measured,requirement,pass");
    assert!(table.lines().skip(1).all(|l| l.ends_with(",1")));
    let meta = fs::read_to_string(out_dir.join("verify.meta")).unwrap();
    assert!(meta.contains("all_pass = true"));
}

#[test]
fn stability_map_outputs_are_deterministic() {
    let dir = tmp_dir("map");
    let cfg = write_config(
        &dir,
        "[stability-map]\nm_samples = 21\na_samples = 31\nm_min = -1\nm_max = 2\na_min = -0.3\na_max = 0.5\n",
    );
    let out1 = dir.join("out1");
    let out2 = dir.join("out2");
    for out_dir in [&out1, &out2] {
        let out = run(&[
            "stability-map",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--threads",
            "2",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["stability_map_1d.csv", "stability_map_2d.csv", "stability_map.meta"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
    let csv = fs::read_to_string(out1.join("stability_map_1d.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("m,"));
    assert_eq!(csv.lines().count(), 22); // header + m rows
    assert_eq!(header.split(',').count(), 32); // label + a columns
}

#[test]
fn singular_bar_writes_fields_and_meta() {
    let dir = tmp_dir("bar");
    let cfg = write_config(
        &dir,
        "[singular-bar]\nnodes = 80\nsigma_over_e0 = 1e-3\nadr_max_iter = 60000\n",
    );
    let out_dir = dir.join("out");
    let out = run(&[
        "singular-bar",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(out_dir.join("singular_bar.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "x_over_l,u_num,u_ref,strain_num,strain_ref");
    assert_eq!(table.lines().count(), 81);
    let meta = fs::read_to_string(out_dir.join("singular_bar.meta")).unwrap();
    assert!(meta.contains("command = singular-bar"));
    assert!(meta.contains("nodes = 80"));
    assert!(meta.contains("alpha = 10")); // defaulted parameters are echoed
    assert!(meta.contains("converged = true"));
}

#[test]
fn singular_bar_divergence_still_writes_output_with_exit_2() {
    let dir = tmp_dir("bar_div");
    let cfg = write_config(
        &dir,
        "[singular-bar]\nnodes = 80\nsigma_over_e0 = -1e-5\nadr_max_iter = 3000\n",
    );
    let out_dir = dir.join("out");
    let out = run(&[
        "singular-bar",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out_dir.join("singular_bar.csv").exists());
    let meta = fs::read_to_string(out_dir.join("singular_bar.meta")).unwrap();
    assert!(meta.contains("converged = false"));
}

#[test]
fn step_size_tabulates_cases() {
    let dir = tmp_dir("steps");
    let cfg = write_config(
        &dir,
        "[step-size]\nnodes = 60\nstrains = 0.5\nstep_counts = 1,2\nsearch_strains = 0.5\n",
    );
    let out_dir = dir.join("out");
    let out = run(&[
        "step-size",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(out_dir.join("step_size.csv")).unwrap();
    assert!(table.lines().next().unwrap().starts_with("strain,steps,converged"));
    let summary = fs::read_to_string(out_dir.join("step_size_summary.csv")).unwrap();
    assert!(summary.contains(",1")); // tension converges in one step
}

#[test]
fn cuboid_and_dispersion_write_expected_files() {
    let dir = tmp_dir("cuboid");
    let cfg = write_config(
        &dir,
        "[cuboid]\nnx = 8\nn_steps = 60\nramp_steps = 30\nsample_every = 20\n\n[dispersion]\nn_samples = 50\nu0_over_dx = 1e-8\n",
    );
    let out_dir = dir.join("out");
    let out = run(&[
        "cuboid",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "cuboid_displacements.csv",
        "cuboid_reactions.csv",
        "cuboid_roughness.csv",
        "cuboid.meta",
    ] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let disp = fs::read_to_string(out_dir.join("cuboid_displacements.csv")).unwrap();
    assert_eq!(disp.lines().count(), 8 * 2 * 2 + 1);

    let out = run(&[
        "dispersion",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sweep = fs::read_to_string(out_dir.join("dispersion_u0_1e-8.csv")).unwrap();
    assert!(sweep.lines().next().unwrap().starts_with("k,omega2_m0"));
    assert_eq!(sweep.lines().count(), 52);
    assert!(out_dir.join("dispersion_flags.csv").exists());
}
