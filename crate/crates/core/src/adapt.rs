//! Dörfler marking and the solve, recover, estimate, mark, refine loop.

use crate::error::{Error, Result};
use crate::estimator::{assemble_report, observed_constants, EstimatorReport, ObservedConstants};
use crate::fem::{self, DeltaRule, P1Function};
use crate::mesh::Mesh;
use crate::problems::{exact_errors, BenchmarkProblem, ExactErrors};
use crate::recovery::{recover, FluxField, GammaRule, RecoveryKind};

/// Which fraction of the squared indicator sum the marked set must carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BulkCriterion {
    /// `Σ_{K∈M} η_K² ≥ θ² Σ_K η_K²`.
    #[default]
    ThetaSquared,
    /// `Σ_{K∈M} η_K² ≥ θ Σ_K η_K²`.
    Theta,
}

impl BulkCriterion {
    pub fn name(self) -> &'static str {
        match self {
            BulkCriterion::ThetaSquared => "theta-squared",
            BulkCriterion::Theta => "theta",
        }
    }

    fn fraction(self, theta: f64) -> f64 {
        match self {
            BulkCriterion::ThetaSquared => theta * theta,
            BulkCriterion::Theta => theta,
        }
    }
}

impl std::str::FromStr for BulkCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta-squared" => Ok(BulkCriterion::ThetaSquared),
            "theta" => Ok(BulkCriterion::Theta),
            _ => Err(Error::InvalidArgument(format!("unknown bulk criterion '{s}'"))),
        }
    }
}

/// Smallest set of elements, taken greedily by decreasing indicator with
/// ties to the lower index, such that `Σ_{K∈M} η_K² ≥ θ² Σ_K η_K²`.
/// All-zero indicators give an empty set.
pub fn dorfler_mark(indicators: &[f64], theta: f64) -> Result<Vec<usize>> {
    dorfler_mark_with(indicators, theta, BulkCriterion::ThetaSquared)
}

pub fn dorfler_mark_with(indicators: &[f64], theta: f64, criterion: BulkCriterion) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("marking parameter must lie in (0, 1], got {theta}")));
    }
    if let Some(bad) = indicators.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("indicator {bad} is not a finite nonnegative number")));
    }
    let total: f64 = indicators.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..indicators.len()).filter(|&i| indicators[i] > 0.0).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let target = criterion.fraction(theta) * total;
    let mut sum = 0.0;
    let mut marked = Vec::new();
    for i in order {
        marked.push(i);
        sum += indicators[i] * indicators[i];
        if sum >= target {
            break;
        }
    }
    Ok(marked)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptConfig {
    pub theta: f64,
    pub delta: DeltaRule,
    pub recovery: RecoveryKind,
    pub gamma: GammaRule,
    /// Stop once `η ≤ tol`.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_elements: usize,
    pub bulk: BulkCriterion,
    /// Rounds of bisection applied to each marked element (1 or 2).
    pub bisections: u32,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            delta: DeltaRule::new(4.0),
            recovery: RecoveryKind::L2Rt0,
            gamma: GammaRule::default(),
            tol: 0.0,
            max_iterations: 8,
            max_elements: 200_000,
            bulk: BulkCriterion::ThetaSquared,
            bisections: 1,
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be nonnegative, got {}", self.tol)));
        }
        if self.max_iterations == 0 || self.max_elements == 0 {
            return Err(Error::InvalidArgument("iteration and element budgets must be positive".into()));
        }
        if !(self.delta.c_delta >= 0.0) || !self.delta.c_delta.is_finite() {
            return Err(Error::InvalidArgument(format!("c_delta must be nonnegative, got {}", self.delta.c_delta)));
        }
        if !(1..=2).contains(&self.bisections) {
            return Err(Error::InvalidArgument(format!("bisections per mark must be 1 or 2, got {}", self.bisections)));
        }
        self.gamma.validate()
    }
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIterations,
    MaxElements,
    NothingMarked,
}

/// One row of the history.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub n_elements: usize,
    pub dof: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub eta: f64,
    pub phi: f64,
    pub osc: f64,
    pub jump_estimator: f64,
    pub errors: Option<ExactErrors>,
    pub constants: ObservedConstants,
    pub n_marked: usize,
}

impl IterationRecord {
    /// `η / err_SUPG`.
    pub fn eff1(&self) -> Option<f64> {
        self.errors.map(|e| self.eta / e.supg)
    }

    /// `η / |||u − u_h|||_ε`.
    pub fn eff2(&self) -> Option<f64> {
        self.errors.map(|e| self.eta / e.eps_triple)
    }

    /// Semicolon-separated diagnostic flags.
    pub fn flags(&self) -> String {
        let mut f = Vec::new();
        if self.errors.is_some_and(|e| e.quadrature_sensitive) {
            f.push("quad_sensitive");
        }
        f.join(";")
    }
}

#[derive(Debug, Clone)]
pub struct RunHistory {
    pub records: Vec<IterationRecord>,
    pub stop: Option<StopReason>,
    pub final_mesh: Mesh,
    pub final_solution: Vec<f64>,
    pub corner_conflicts: usize,
}

/// Everything available to an observer after the estimate step.
pub struct IterationView<'a, 'm> {
    pub record: &'a IterationRecord,
    pub mesh: &'m Mesh,
    pub solution: &'a P1Function<'m>,
    pub flux: &'a FluxField<'m>,
    pub report: &'a EstimatorReport,
    /// Elements marked for refinement; empty when the loop stops here.
    pub marked: &'a [usize],
}

/// Failure in the middle of a run, with the iterations completed before it.
#[derive(Debug)]
pub struct AdaptError {
    pub error: Error,
    pub partial: Vec<IterationRecord>,
}

impl std::fmt::Display for AdaptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} completed iterations)", self.error, self.partial.len())
    }
}

impl std::error::Error for AdaptError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

pub fn adaptive_solve(problem: &BenchmarkProblem, config: &AdaptConfig) -> Result<RunHistory, AdaptError> {
    adaptive_solve_observed(problem, config, |_| {})
}

struct Step<'m> {
    dof: usize,
    conflicts: usize,
    u_h: P1Function<'m>,
    sigma: FluxField<'m>,
    report: EstimatorReport,
    constants: ObservedConstants,
    errors: Option<ExactErrors>,
}

fn step<'m>(mesh: &'m Mesh, problem: &BenchmarkProblem, config: &AdaptConfig) -> Result<Step<'m>> {
    let prob = &problem.spec;
    let sys = fem::assemble_supg(mesh, prob, config.delta)?;
    let u_h = fem::solve_system(mesh, &sys)?;
    let sigma = recover(config.recovery, &u_h, prob, config.gamma)?;
    let report = assemble_report(&u_h, &sigma, prob, config.recovery)?;
    let constants = observed_constants(&u_h, &sigma, &report, prob)?;
    let errors = match prob.exact {
        Some(_) => Some(exact_errors(&u_h, prob, config.delta)?),
        None => None,
    };
    Ok(Step { dof: sys.n_unknowns(), conflicts: sys.dirichlet.corner_conflicts.len(), u_h, sigma, report, constants, errors })
}

/// Bisects the marked elements, and with `bisections = 2` bisects every
/// child of a marked element once more.
pub fn refine_marked(mesh: &Mesh, marked: &[usize], bisections: u32) -> Result<Mesh> {
    let (once, parent) = mesh.refine_tracked(marked)?;
    if bisections < 2 {
        return Ok(once);
    }
    let mut is_marked = vec![false; mesh.n_triangles()];
    for &t in marked {
        is_marked[t] = true;
    }
    let children: Vec<usize> = (0..once.n_triangles()).filter(|&c| is_marked[parent[c]]).collect();
    once.refine(&children)
}

/// The adaptive loop, calling `observer` once per iteration.
pub fn adaptive_solve_observed(
    problem: &BenchmarkProblem,
    config: &AdaptConfig,
    mut observer: impl FnMut(&IterationView),
) -> Result<RunHistory, AdaptError> {
    let fail = |error: Error, partial: &Vec<IterationRecord>| AdaptError { error, partial: partial.clone() };
    let mut records: Vec<IterationRecord> = Vec::new();
    config.validate().map_err(|e| fail(e, &records))?;
    let mut mesh = problem.initial_mesh().map_err(|e| fail(e, &records))?;
    loop {
        let iteration = records.len() + 1;
        let Step { dof, conflicts, u_h, sigma, report, constants, errors } =
            step(&mesh, problem, config).map_err(|e| fail(e, &records))?;

        let stop = if report.eta <= config.tol {
            Some(StopReason::Tolerance)
        } else if iteration >= config.max_iterations {
            Some(StopReason::MaxIterations)
        } else if mesh.n_triangles() >= config.max_elements {
            Some(StopReason::MaxElements)
        } else {
            None
        };
        let marked = match stop {
            Some(_) => Vec::new(),
            None => dorfler_mark_with(&report.eta_k, config.theta, config.bulk).map_err(|e| fail(e, &records))?,
        };
        let stop = stop.or(marked.is_empty().then_some(StopReason::NothingMarked));
        let record = IterationRecord {
            iteration,
            n_elements: mesh.n_triangles(),
            dof,
            h_max: mesh.h_max(),
            h_min: mesh.h_min(),
            eta: report.eta,
            phi: report.phi,
            osc: report.osc,
            jump_estimator: report.jump_estimator,
            errors,
            constants,
            n_marked: marked.len(),
        };
        observer(&IterationView {
            record: &record,
            mesh: &mesh,
            solution: &u_h,
            flux: &sigma,
            report: &report,
            marked: &marked,
        });
        records.push(record);
        if let Some(reason) = stop {
            let final_solution = u_h.into_values();
            return Ok(RunHistory { records, stop: Some(reason), final_mesh: mesh, final_solution, corner_conflicts: conflicts });
        }
        mesh = refine_marked(&mesh, &marked, config.bisections).map_err(|e| fail(e, &records))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dorfler_examples() {
        assert_eq!(dorfler_mark(&[3.0, 2.0, 1.0], 0.5).unwrap(), vec![0]);
        assert_eq!(dorfler_mark(&[1.0, 0.0, 2.0, 1.0], 1.0).unwrap(), vec![2, 0, 3]);
        assert_eq!(dorfler_mark(&[1.0, 5.0, 2.0], 1e-9).unwrap(), vec![1]);
        assert!(dorfler_mark(&[0.0, 0.0], 0.5).unwrap().is_empty());
    }

    #[test]
    fn dorfler_ties_prefer_lower_index() {
        assert_eq!(dorfler_mark(&[1.0, 1.0, 1.0, 1.0], 0.5).unwrap(), vec![0]);
        assert_eq!(dorfler_mark(&[1.0, 2.0, 2.0], 0.8).unwrap(), vec![1, 2]);
    }

    #[test]
    fn dorfler_rejects_bad_input() {
        assert!(dorfler_mark(&[1.0], 0.0).is_err());
        assert!(dorfler_mark(&[1.0], 1.5).is_err());
        assert!(dorfler_mark(&[-1.0], 0.5).is_err());
        assert!(dorfler_mark(&[f64::NAN], 0.5).is_err());
    }

    #[test]
    fn theta_bulk_criterion() {
        // Squared sum 14; θ = 0.5 needs 3.5 under θ² and 7 under θ.
        assert_eq!(dorfler_mark_with(&[3.0, 2.0, 1.0], 0.5, BulkCriterion::Theta).unwrap(), vec![0]);
        assert_eq!(dorfler_mark_with(&[2.0, 2.0, 2.0], 0.5, BulkCriterion::Theta).unwrap(), vec![0, 1]);
        assert_eq!(dorfler_mark_with(&[2.0, 2.0, 2.0], 0.5, BulkCriterion::ThetaSquared).unwrap(), vec![0]);
        assert_eq!("theta".parse::<BulkCriterion>().unwrap(), BulkCriterion::Theta);
    }

    #[test]
    fn double_bisection_halves_marked() {
        let m = Mesh::square([0.0, 0.0], [1.0, 1.0], 2, |_| crate::mesh::BoundaryTag::Dirichlet).unwrap();
        let once = refine_marked(&m, &[0], 1).unwrap();
        let twice = refine_marked(&m, &[0], 2).unwrap();
        assert!(twice.n_triangles() > once.n_triangles());
        assert!((twice.h_min() - m.diameter(0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(AdaptConfig::default().validate().is_ok());
        assert!(AdaptConfig { theta: 0.0, ..Default::default() }.validate().is_err());
        assert!(AdaptConfig { max_iterations: 0, ..Default::default() }.validate().is_err());
        assert!(AdaptConfig { tol: -1.0, ..Default::default() }.validate().is_err());
        assert!(AdaptConfig { bisections: 3, ..Default::default() }.validate().is_err());
    }
}
