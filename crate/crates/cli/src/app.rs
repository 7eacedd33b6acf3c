use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::measure::{cmd_measure, evaluator, MeasureName, MeasureRequest, SetName};
use crate::sweep::{cmd_sweep, SweepKind};
use crate::verify::{cmd_verify, Suite};

#[derive(Debug, Parser)]
#[command(name = "resq", version, about = "One-shot resource measures over explicit free sets")]
pub struct Cli {
    /// Print the full JSON report instead of the plain rendering.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one measure of a state against a free set.
    Measure {
        /// Catalog label (strange, hoggar, bell2, ...) or path to a state file.
        #[arg(long)]
        state: String,
        #[arg(long, value_enum)]
        set: SetName,
        #[arg(long, value_enum)]
        measure: MeasureName,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Overhead for `gfid`.
        #[arg(long)]
        k: Option<f64>,
    },
    /// Run a verification suite; exits 1 if any row fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Write a CSV sweep.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        output: PathBuf,
        /// Smoothing parameter for the `dh_eps` column.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
}

/// Runs a parsed command and returns what should go to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let ev = evaluator()?;
    let start = Instant::now();
    let report = match &cli.command {
        Command::Measure {
            state,
            set,
            measure,
            eps,
            k,
        } => {
            let req = MeasureRequest {
                state: state.clone(),
                set: *set,
                measure: *measure,
                eps: *eps,
                k: *k,
            };
            cmd_measure(&req, &ev)?
        }
        Command::Verify { suite } => cmd_verify(*suite, &ev),
        Command::Sweep {
            kind,
            step,
            output,
            eps,
        } => {
            let rows = cmd_sweep(*kind, *step, *eps, output, &ev)?;
            eprintln!("wall time {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
            return Ok(format!("wrote {rows} rows to {}\n", output.display()));
        }
    };
    eprintln!("wall time {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    let text = if cli.json {
        report.to_json() + "\n"
    } else {
        report.render()
    };
    match report.failures() {
        0 => Ok(text),
        n => {
            // the table is still useful when something fails
            print!("{text}");
            Err(CliError::VerifyFailed(n))
        }
    }
}

/// Parses arguments, runs, and maps errors to the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("resq: {e}");
            e.exit_code()
        }
    }
}
