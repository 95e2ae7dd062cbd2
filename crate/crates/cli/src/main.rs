use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modindex_cli::checks::OPS;
use modindex_cli::{emit, run_scenario, validate, Format, RunOptions, Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "modindex", version, about = "Run modindex check scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario and print the report.
    Run {
        file: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance for every `<=` assertion without its own override.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 picks one per core.
        #[arg(long, env = "MODINDEX_JOBS", default_value_t = 0)]
        jobs: usize,
    },
    /// Parse and type-check a scenario without running it.
    Verify { file: PathBuf },
    /// List the available check operations.
    ListChecks,
}

fn load(path: &Path) -> Result<Scenario, ExitCode> {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(2));
        }
    };
    Scenario::parse(&src).map_err(|e| usage(path, &e))
}

fn usage(path: &Path, e: &ScenarioError) -> ExitCode {
    eprintln!("error: {}: {e}", path.display());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListChecks => {
            for op in OPS {
                println!("{:<28} {:<9} {}", op.name, op.module, op.about);
            }
            ExitCode::SUCCESS
        }
        Command::Verify { file } => {
            let sc = match load(&file) {
                Ok(sc) => sc,
                Err(code) => return code,
            };
            match validate(&sc) {
                Ok(()) => {
                    println!("ok: {} ({} checks)", sc.name, sc.checks.len());
                    ExitCode::SUCCESS
                }
                Err(e) => usage(&file, &e),
            }
        }
        Command::Run { file, seed, tolerance, format, out, jobs } => {
            let sc = match load(&file) {
                Ok(sc) => sc,
                Err(code) => return code,
            };
            let opts = RunOptions { seed, tolerance, jobs };
            let report = match run_scenario(&sc, &opts) {
                Ok(r) => r,
                Err(e) => return usage(&file, &e),
            };
            let text = match emit(&report, format) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            let s = &report.summary;
            eprintln!("{}: {} checks, {} passed, {} failed, {} errors", report.scenario, s.checks, s.passed, s.failed, s.errors);
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
