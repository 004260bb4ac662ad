//! peristab: peridynamic correspondence-model experiments and stability maps.
//!
//! Usage: `peristab <command> [--config <path>] [--out <dir>] [--threads <n>]`
//!
//! Commands: singular-bar, step-size, cuboid, dispersion, stability-map,
//! verify. Outputs are UTF-8 CSV plus a `.meta` key = value file echoing all
//! parameters. Exit codes: 0 success, 1 configuration error, 2 solver
//! divergence (outputs are still written).

mod commands;
mod config;
mod output;

use commands::CmdError;
use config::Config;
use output::OutDir;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "usage: peristab <command> [--config <path>] [--out <dir>] [--threads <n>]
commands:
  singular-bar    static bar with a square-root modulus singularity
  step-size       load-step convergence study under tension and compression
  cuboid          explicit dynamics of a 4x1x1 block under uniaxial ends
  dispersion      plane-wave dispersion sweep of the 1D bar
  stability-map   hydrostatic (m, a) stability maps in 1D and 2D
  verify          closed-form verification table";

fn run() -> Result<i32, String> {
    let mut args = std::env::args().skip(1);
    let Some(command) = args.next() else {
        return Err(USAGE.to_string());
    };
    if command == "--help" || command == "-h" || command == "help" {
        println!("{USAGE}");
        return Ok(0);
    }
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir = PathBuf::from("out");
    let mut threads = 0usize;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--config" => {
                let v = args.next().ok_or("--config requires a path")?;
                config_path = Some(v.into());
            }
            "--out" => {
                let v = args.next().ok_or("--out requires a directory")?;
                out_dir = v.into();
            }
            "--threads" => {
                let v = args.next().ok_or("--threads requires a count")?;
                threads = v
                    .parse()
                    .map_err(|_| format!("--threads: bad count {v:?}"))?;
            }
            other => return Err(format!("unknown argument {other:?}\n{USAGE}")),
        }
    }
    if threads > 0 {
        peristab::exec::configure_threads(threads);
    }
    let config = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            Config::parse(&text).map_err(|e| e.to_string())?
        }
        None => Config::default(),
    };
    let out = OutDir::create(&out_dir).map_err(|e| format!("cannot create output dir: {e}"))?;

    let result = match command.as_str() {
        "singular-bar" => commands::singular_bar(&config, &out),
        "step-size" => commands::step_size(&config, &out),
        "cuboid" => commands::cuboid(&config, &out),
        "dispersion" => commands::dispersion(&config, &out),
        "stability-map" => commands::stability_map(&config, &out),
        "verify" => commands::verify(&config, &out),
        other => return Err(format!("unknown command {other:?}\n{USAGE}")),
    };
    match result {
        Ok(code) => Ok(code),
        Err(CmdError::Config(msg)) => Err(format!("configuration error: {msg}")),
        Err(CmdError::Io(e)) => Err(format!("io error: {e}")),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
