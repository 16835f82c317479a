use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dirac_top::cli::{calibrate, trace, verify, write_trace, RunConfig, Suite, TEMPLATE};

#[derive(Parser)]
#[command(name = "dirac-top", version, about = "Verification engine for the relativistic-top construction of the Dirac equation")]
struct Args {
    /// Print a commented configuration template and exit.
    #[arg(long)]
    emit_template: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a JSON report.
    Verify {
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Include per-check wall times (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Report computed reduction constants against the quoted ones.
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Integrate guiding-wave trajectories and write CSV files plus a summary.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn load(path: Option<&Path>) -> Result<RunConfig, String> {
    match path {
        Some(p) => RunConfig::load(p).map_err(|e| e.to_string()),
        None => Ok(RunConfig::default()),
    }
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<u8, (u8, String)> {
    let usage = |e: String| (EXIT_USAGE, e);
    match command {
        Command::Verify { suites, seed, config, timings } => {
            let mut cfg = load(config.as_deref()).map_err(usage)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            let report = verify(&cfg, timings).map_err(|e| usage(e.to_string()))?;
            for c in report.checks() {
                println!(
                    "{} {} residual {:e} tolerance {:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.tolerance
                );
            }
            write(&cfg.output.report, &(report.to_json() + "\n")).map_err(|e| (EXIT_FAIL, e))?;
            println!("report written to {}", cfg.output.report.display());
            Ok(if report.pass { 0 } else { EXIT_FAIL })
        }
        Command::Calibrate { config } => {
            let cfg = load(config.as_deref()).map_err(usage)?;
            let out = calibrate(&cfg).map_err(|e| (EXIT_FAIL, e.to_string()))?;
            let json = serde_json::to_string_pretty(&out).expect("calibration serializes") + "\n";
            write(&cfg.output.calibration, &json).map_err(|e| (EXIT_FAIL, e))?;
            print!("{json}");
            Ok(0)
        }
        Command::Trace { config, out } => {
            let cfg = load(Some(&config)).map_err(usage)?;
            let run = trace(&cfg).map_err(|e| (EXIT_FAIL, e.to_string()))?;
            let dir = out.unwrap_or_else(|| cfg.output.trace_dir.clone());
            for t in &run.summary.trajectories {
                if let Some(w) = &t.warning {
                    eprintln!("warning: trajectory {}: {w}", t.index);
                }
                if let Some(r) = &t.truncated {
                    eprintln!("warning: trajectory {} truncated: {r}", t.index);
                }
            }
            let files = write_trace(&run, &dir).map_err(|e| (EXIT_FAIL, e.to_string()))?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if args.emit_template {
        print!("{TEMPLATE}");
        return ExitCode::SUCCESS;
    }
    let Some(command) = args.command else {
        eprintln!("error: a subcommand is required (verify, calibrate, trace) or --emit-template");
        return ExitCode::from(EXIT_USAGE);
    };
    match run(command) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
