//! `supg-adapt`: adaptive SUPG runs with recovery-based error estimators.
//!
//! `run` drives the adaptive loop for a built-in or file-defined problem,
//! optionally over a list of diffusion parameters, and writes a history CSV,
//! run metadata and mesh dumps. `report` summarizes history files.

mod history;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "supg-adapt", version, about = "Adaptive SUPG with recovery-based a posteriori error estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop and write history.csv and meta.json.
    Run(RunArgs),
    /// Print a summary table for one or more history.csv files.
    Report {
        #[arg(required = true)]
        histories: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["problem", "config"])))]
pub struct RunArgs {
    /// Built-in problem: example1, example2 or smooth.
    #[arg(long)]
    pub problem: Option<String>,
    /// Problem file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Diffusion parameter; overrides the value in a problem file.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated diffusion parameters, one run and subdirectory each.
    #[arg(long, value_delimiter = ',')]
    pub sweep_epsilon: Vec<f64>,
    /// Marking parameter in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Multiplier c in delta_K = c * h_K; 0 gives the plain Galerkin method.
    #[arg(long, default_value_t = 4.0)]
    pub delta: f64,
    /// explicit, l2-rt0, l2-bdm1, hdiv or hdiv-bdm1.
    #[arg(long, default_value = "l2-rt0")]
    pub recovery: String,
    /// Constant in the divergence-penalty weight of the hdiv recoveries.
    #[arg(long, default_value_t = 1.0)]
    pub c_stab: f64,
    /// Stop once the estimator drops to this value.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long, default_value_t = 8)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 200_000)]
    pub max_elements: usize,
    /// theta-squared or theta.
    #[arg(long, default_value = "theta-squared")]
    pub bulk: String,
    /// Bisections applied to each marked element (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub bisections: u32,
    #[arg(long, default_value = "supg-adapt-out")]
    pub out: PathBuf,
    /// Write mesh_NNN.txt for every iteration.
    #[arg(long)]
    pub dump_meshes: bool,
}

fn run(args: &RunArgs) -> Result<()> {
    let jobs = run::plan(args)?;
    let results: Vec<Result<String>> = if jobs.len() == 1 {
        vec![run::execute(&jobs[0], args.dump_meshes)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().map(|job| s.spawn(|| run::execute(job, args.dump_meshes))).collect();
            handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
        })
    };
    let mut failures = 0;
    for r in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("error: {e:#}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        bail!("{failures} of {} runs failed", jobs.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Report { histories } => report::render(histories).map(|table| print!("{table}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
