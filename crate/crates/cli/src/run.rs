//! Resolving a run request into problems and configs, executing it, and
//! writing the artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use supg_recovery::adapt::{adaptive_solve_observed, AdaptConfig, RunHistory, StopReason};
use supg_recovery::fem::DeltaRule;
use supg_recovery::io::mesh_to_string;
use supg_recovery::linalg::{RECOVERY_TOL, SUPG_TOL};
use supg_recovery::problems::{by_name, from_config, BenchmarkProblem};
use supg_recovery::recovery::GammaRule;

use crate::history;
use crate::RunArgs;

/// One fully validated run: where it writes and what it solves.
pub struct Job {
    pub dir: PathBuf,
    pub problem: BenchmarkProblem,
    pub config: AdaptConfig,
}

fn load_problem(args: &RunArgs, eps: Option<f64>) -> Result<BenchmarkProblem> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading problem file {}", path.display()))?;
        return from_config(&text, eps).with_context(|| format!("problem file {}", path.display()));
    }
    let name = args.problem.as_deref().ok_or_else(|| anyhow!("one of --problem or --config is required"))?;
    let eps = match (eps, name) {
        (Some(e), _) => e,
        (None, "smooth") => 1.0,
        (None, _) => bail!("--epsilon (or --sweep-epsilon) is required for problem '{name}'"),
    };
    Ok(by_name(name, eps)?)
}

fn adapt_config(args: &RunArgs) -> Result<AdaptConfig> {
    let config = AdaptConfig {
        theta: args.theta,
        delta: DeltaRule::new(args.delta),
        recovery: args.recovery.parse()?,
        gamma: GammaRule::new(args.c_stab),
        tol: args.tol,
        max_iterations: args.max_iters,
        max_elements: args.max_elements,
        bulk: args.bulk.parse()?,
        bisections: args.bisections,
    };
    config.validate()?;
    Ok(config)
}

pub fn sweep_dir_name(eps: f64) -> String {
    format!("eps_{eps:e}")
}

/// Everything is checked here, before any file is created.
pub fn plan(args: &RunArgs) -> Result<Vec<Job>> {
    let config = adapt_config(args)?;
    if args.out.is_file() {
        bail!("output path {} is an existing file", args.out.display());
    }
    if args.sweep_epsilon.is_empty() {
        let problem = load_problem(args, args.epsilon)?;
        return Ok(vec![Job { dir: args.out.clone(), problem, config }]);
    }
    let mut seen = Vec::new();
    let mut jobs = Vec::new();
    for &eps in &args.sweep_epsilon {
        let dir = sweep_dir_name(eps);
        if seen.contains(&dir) {
            bail!("--sweep-epsilon lists {eps:e} twice");
        }
        seen.push(dir.clone());
        let problem = load_problem(args, Some(eps)).with_context(|| format!("sweep value {eps:e}"))?;
        jobs.push(Job { dir: args.out.join(dir), problem, config });
    }
    Ok(jobs)
}

fn stop_name(stop: Option<StopReason>) -> &'static str {
    match stop {
        Some(StopReason::Tolerance) => "tolerance",
        Some(StopReason::MaxIterations) => "max_iterations",
        Some(StopReason::MaxElements) => "max_elements",
        Some(StopReason::NothingMarked) => "nothing_marked",
        None => "failed",
    }
}

fn meta(job: &Job, history: Option<&RunHistory>, error: Option<String>, iterations: usize, seconds: f64) -> serde_json::Value {
    let c = &job.config;
    let spec = &job.problem.spec;
    json!({
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "history_format": history::VERSION_LINE.trim_start_matches("# "),
        "problem": {
            "name": job.problem.name,
            "description": job.problem.reference,
            "epsilon": spec.epsilon,
            "beta": spec.beta,
            "domain": [job.problem.lower, job.problem.upper],
            "initial_cells_per_side": job.problem.cells,
            "has_exact_solution": spec.exact.is_some(),
        },
        "config": {
            "theta": c.theta,
            "c_delta": c.delta.c_delta,
            "recovery": c.recovery.name(),
            "c_stab": c.gamma.c_stab,
            "tol": c.tol,
            "max_iterations": c.max_iterations,
            "max_elements": c.max_elements,
            "bulk": c.bulk.name(),
            "bisections_per_mark": c.bisections,
        },
        "decisions": {
            "delta": "delta_K = c_delta * h_K with h_K the longest side",
            "marking": "greedy by decreasing indicator, ties to the lower element index, until the marked squared sum reaches the bulk fraction of the total",
            "refinement": "longest-edge bisection with conforming closure",
            "dirichlet_corners": "vertices where adjacent Dirichlet edges disagree get the average of the one-sided limits",
            "eta": "square root of the sum of squared element indicators and weighted Neumann edge terms",
            "recovery_systems": "multiplied through by epsilon",
            "supg_solver": format!("ILU(0)-preconditioned GMRES, relative residual {SUPG_TOL:e}"),
            "recovery_solver": format!("Jacobi-preconditioned CG, relative residual {RECOVERY_TOL:e}"),
        },
        "result": {
            "iterations": iterations,
            "stop": stop_name(history.and_then(|h| h.stop)),
            "error": error,
            "corner_conflicts": history.map(|h| h.corner_conflicts),
            "final_elements": history.map(|h| h.final_mesh.n_triangles()),
        },
        "wall_time_seconds": seconds,
    })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Runs one job, writes its artifacts and returns a one-line summary.
pub fn execute(job: &Job, dump_meshes: bool) -> Result<String> {
    fs::create_dir_all(&job.dir).with_context(|| format!("creating {}", job.dir.display()))?;
    let start = Instant::now();
    let mut dump_error = None;
    let outcome = adaptive_solve_observed(&job.problem, &job.config, |view| {
        if dump_meshes && dump_error.is_none() {
            let path = job.dir.join(format!("mesh_{:03}.txt", view.record.iteration));
            dump_error = write(&path, &mesh_to_string(view.mesh)).err();
        }
    });
    let seconds = start.elapsed().as_secs_f64();
    let (records, history, error) = match &outcome {
        Ok(h) => (h.records.clone(), Some(h), None),
        Err(e) => (e.partial.clone(), None, Some(e.to_string())),
    };
    write(&job.dir.join("history.csv"), &history::to_string(&records)?)?;
    let meta = meta(job, history, error, records.len(), seconds);
    write(&job.dir.join("meta.json"), &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    if let Some(e) = dump_error {
        return Err(e);
    }
    let h = outcome.map_err(|e| anyhow!("{}: {e}", job.dir.display()))?;
    let last = h.records.last().expect("a completed run has at least one iteration");
    Ok(format!(
        "{}: epsilon {:e}, {} iterations ({}), {} elements, eta {:.4e}",
        job.dir.display(),
        job.problem.spec.epsilon,
        h.records.len(),
        stop_name(h.stop),
        last.n_elements,
        last.eta
    ))
}
