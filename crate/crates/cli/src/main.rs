//! `qlab`: run circuits, print algorithm demos and grade lab submissions.

mod demo;
mod histogram;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qlab_core::grader::{builtin_labs, find_lab, load_labs_from_dir, run_lab, LabSpec};
use qlab_core::{circuit::parse_circuit, Circuit, NoiseModel};

use demo::{DemoName, DemoParams};

/// Overrides the built-in lab manifests with every `*.json` in a directory.
const LAB_DIR_VAR: &str = "QLAB_LAB_DIR";

#[derive(Parser)]
#[command(
    name = "qlab",
    version,
    about = "Sparse quantum circuit simulator and lab grader"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a circuit file and print a histogram (or write counts JSON).
    ///
    /// A circuit without measurements is measured on every qubit.
    Run {
        circuit: PathBuf,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Noise model JSON file.
        #[arg(long)]
        noise: Option<PathBuf>,
        /// Write counts JSON here instead of printing a histogram.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk through one algorithm.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Register width (qft, dj, grover), counting qubits (qpe) or the number to factor (shor).
        #[arg(long)]
        n: Option<u64>,
        /// Comma-separated marked labels for grover.
        #[arg(long)]
        marked: Option<String>,
        /// Phase angle in radians (kickback) or eigenphase as a fraction of a turn (qpe).
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
    },
    /// Grade a submission file; exit code 0 PASS, 1 FAIL, 2 INVALID.
    Grade { lab: String, submission: PathBuf },
    /// List the available labs.
    Labs,
    /// Print the version.
    Version,
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_circuit(path: &Path) -> Result<Circuit, String> {
    parse_circuit(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn labs() -> Result<Vec<LabSpec>, String> {
    match std::env::var_os(LAB_DIR_VAR) {
        Some(dir) => load_labs_from_dir(Path::new(&dir)).map_err(|e| format!("{LAB_DIR_VAR}: {e}")),
        None => Ok(builtin_labs()),
    }
}

fn cmd_run(
    path: &Path,
    shots: u64,
    seed: u64,
    noise: Option<&Path>,
    out: Option<&Path>,
) -> Result<String, String> {
    let mut circuit = load_circuit(path)?;
    if !circuit.has_measurement() {
        let all: Vec<usize> = (0..circuit.num_qubits()).collect();
        circuit.measure(&all).map_err(|e| e.to_string())?;
    }
    let model = noise
        .map(|p| NoiseModel::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display())))
        .transpose()?;
    let counts = circuit
        .run_shots(shots, seed, model.as_ref())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    match out {
        Some(out) => {
            std::fs::write(out, counts.to_json() + "\n")
                .map_err(|e| format!("{}: {e}", out.display()))?;
            Ok(String::new())
        }
        None => Ok(histogram::render(&counts)),
    }
}

fn cmd_grade(lab_id: &str, submission: &Path) -> Result<(String, u8), String> {
    let labs = labs()?;
    let lab = find_lab(&labs, lab_id).ok_or_else(|| {
        let ids: Vec<&str> = labs.iter().map(|l| l.id.as_str()).collect();
        format!("unknown lab {lab_id:?}; available: {}", ids.join(", "))
    })?;
    let report = run_lab(lab, submission);
    Ok((report.to_json() + "\n", report.verdict.exit_code() as u8))
}

fn cmd_labs() -> Result<String, String> {
    Ok(labs()?
        .iter()
        .map(|l| format!("{:<6} {:<12} {}\n", l.id, l.mode.name(), l.title))
        .collect())
}

/// Exit status for usage and input errors; shares the INVALID code.
const ERROR_EXIT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            circuit,
            shots,
            seed,
            noise,
            out,
        } => cmd_run(&circuit, shots, seed, noise.as_deref(), out.as_deref()).map(|s| (s, 0)),
        Command::Demo {
            name,
            n,
            marked,
            theta,
            seed,
            shots,
        } => {
            let params = DemoParams {
                n,
                marked,
                theta,
                seed,
                shots,
            };
            demo::run(name, &params)
                .map(|s| (s, 0))
                .map_err(|e| e.to_string())
        }
        Command::Grade { lab, submission } => cmd_grade(&lab, &submission),
        Command::Labs => cmd_labs().map(|s| (s, 0)),
        Command::Version => Ok((format!("qlab {}\n", env!("CARGO_PKG_VERSION")), 0)),
    };
    match result {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush());
            ExitCode::from(code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
