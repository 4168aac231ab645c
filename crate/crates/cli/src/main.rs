//! `bminimal --config run.json [--out DIR] [--quiet]`
//!
//! Exit status: 0 success, 1 configuration error, 2 solver did not converge,
//! 3 numerical failure.

mod config;
mod output;
mod tasks;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::tasks::Status;

#[derive(Parser, Debug)]
#[command(name = "bminimal", version, about = "Weighted minimal curves and graphs: solvers and checks")]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

const CONFIG_ERROR: u8 = 1;
const NOT_CONVERGED: u8 = 2;
const NUMERICAL_FAILURE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let text = match fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let plan = match config::parse(&text).and_then(|cfg| {
        let plan = config::validate(&cfg)?;
        Ok((cfg, plan))
    }) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let (cfg, plan) = plan;
    let Some(dir) = cli.out.or(cfg.output_dir) else {
        eprintln!("error: no output directory (set output_dir or pass --out)");
        return ExitCode::from(CONFIG_ERROR);
    };

    let finished = match tasks::run(&plan) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(NUMERICAL_FAILURE);
        }
    };
    if let Err(e) = finished.outputs.write(&dir) {
        eprintln!("error: cannot write to {}: {e}", dir.display());
        return ExitCode::from(NUMERICAL_FAILURE);
    }
    match finished.status {
        Status::Ok => {
            if !cli.quiet {
                println!("{}", finished.summary);
                println!("wrote {} to {}", finished.outputs.names().join(", "), dir.display());
            }
            ExitCode::SUCCESS
        }
        Status::NotConverged => {
            eprintln!("error: {}", finished.summary);
            ExitCode::from(NOT_CONVERGED)
        }
        Status::NumericalFailure => {
            eprintln!("error: {}", finished.summary);
            ExitCode::from(NUMERICAL_FAILURE)
        }
    }
}
