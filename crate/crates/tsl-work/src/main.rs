//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 usage or
//! configuration error, 3 numerical abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tsl_work::report::tolerance_scale_from_env;
use tsl_work::runner::{render_csv, run_scenario, sweep_dir, verify_scenario};
use tsl_work::scenario::ScenarioConfig;
use tsl_work::Error;

#[derive(Parser)]
#[command(
    name = "tsl-work",
    version,
    about = "Driven Lindblad dynamics with pointwise speed limits on non-adiabatic work"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its CSV time series plus a report.
    Run {
        /// Builtin tag (fig1a, fig1b, fig1c) or path to a config JSON.
        scenario: String,
        /// Override the CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the report output path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the full verification suite (no CSV output).
    Verify {
        /// Builtin tag or path to a config JSON.
        scenario: String,
        /// Override the report output path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Execute every scenario config (*.json) in a directory.
    Sweep {
        /// Directory containing scenario configs.
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn dispatch(cli: Cli) -> tsl_work::Result<bool> {
    let tol_scale = tolerance_scale_from_env()?;
    match cli.command {
        Command::Run {
            scenario,
            csv,
            report,
        } => {
            let mut cfg = ScenarioConfig::resolve(&scenario)?;
            if csv.is_some() {
                cfg.output.csv = csv;
            }
            if report.is_some() {
                cfg.output.report = report;
            }
            let run = run_scenario(&cfg, tol_scale)?;
            let csv_path = cfg.csv_path();
            std::fs::write(&csv_path, render_csv(&run.evaluations))?;
            let report_path = cfg.report_path();
            run.report.write(&report_path)?;
            print!("{}", run.report.summary());
            println!("csv: {}", csv_path.display());
            println!("report: {}", report_path.display());
            Ok(run.report.passed)
        }
        Command::Verify { scenario, report } => {
            let mut cfg = ScenarioConfig::resolve(&scenario)?;
            if report.is_some() {
                cfg.output.report = report;
            }
            let verdict = verify_scenario(&cfg, tol_scale)?;
            let report_path = cfg.report_path();
            verdict.write(&report_path)?;
            print!("{}", verdict.summary());
            println!("report: {}", report_path.display());
            Ok(verdict.passed)
        }
        Command::Sweep { dir } => {
            let outcomes = sweep_dir(&dir, tol_scale)?;
            let mut all_passed = true;
            for outcome in &outcomes {
                all_passed &= outcome.passed;
                println!(
                    "{}  {}  (csv: {}, report: {})",
                    if outcome.passed { "PASS" } else { "FAIL" },
                    outcome.scenario,
                    outcome.csv_path.display(),
                    outcome.report_path.display()
                );
            }
            Ok(all_passed)
        }
    }
}

/// Map error kinds onto the documented exit codes.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::AtTime { source, .. } => exit_code_for(source),
        _ => 3,
    }
}
