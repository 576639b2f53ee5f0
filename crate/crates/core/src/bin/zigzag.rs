//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 failure during a run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use zigzag_core::run::{run_scenario, RunError};
use zigzag_core::scenario::{preset, Scenario, ScenarioError, PRESETS};

#[derive(Parser)]
#[command(name = "zigzag", version, about = "Pilot-wave trajectories of Weyl and zig-zag fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override a key, e.g. `--set numerics.seed=42`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run a built-in scenario.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Check a scenario file and print the resolved parameters.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the built-in scenarios.
    ListPresets,
    /// Print a built-in scenario as a config file.
    ShowPreset { name: String },
}

fn load(path: &Path, set: &[String]) -> Result<Scenario, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
    Ok(Scenario::parse_with_overrides(&text, set)?)
}

fn execute(s: &Scenario, out: &Path) -> Result<(), RunError> {
    let start = Instant::now();
    let report = run_scenario(s, out)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.excluded > 0 {
        eprintln!("note: {} trajectories excluded after hitting a node", report.excluded);
    }
    for f in &report.files {
        println!("{}", f.display());
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, out, set } => load(&config, &set).and_then(|s| execute(&s, &out)),
        Command::Preset { name, out, set } => preset(&name)
            .and_then(|s| Scenario::parse_with_overrides(&s.emit(), &set))
            .map_err(RunError::from)
            .and_then(|s| execute(&s, &out)),
        Command::Validate { config, set } => load(&config, &set).map(|s| print!("{}", s.emit())),
        Command::ListPresets => {
            for (name, about) in PRESETS {
                println!("{name:<22}{about}");
            }
            Ok(())
        }
        Command::ShowPreset { name } => preset(&name).map(|s| print!("{}", s.emit())).map_err(RunError::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
