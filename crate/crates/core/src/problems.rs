//! Built-in benchmark problems, a key=value problem description format, and
//! exact-error evaluation.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{norm_parts, DeltaRule, ExactSolution, NormParts, P1Function, ProblemSpec, ERROR_DEGREE};
use crate::mesh::{BoundaryTag, Mesh, Point};

/// A problem together with its square domain and initial triangulation.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    /// What the problem is used to reproduce.
    pub reference: String,
    pub spec: ProblemSpec,
    pub lower: Point,
    pub upper: Point,
    /// Squares per side of the initial mesh.
    pub cells: usize,
}

impl BenchmarkProblem {
    /// Each of the `cells²` squares split along the bottom-right to
    /// top-left diagonal.
    pub fn initial_mesh(&self) -> Result<Mesh> {
        let classify = self.spec.boundary.clone();
        Mesh::square(self.lower, self.upper, self.cells, move |x| classify(x))
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!("epsilon must lie in (0, 1], got {eps}")))
    }
}

/// The one-dimensional layer profile `(1 − e^{(x−1)/ε})/(1 − e^{−1/ε}) + x − 1`
/// and its first two derivatives. Both exponentials stay in `[0, 1]` on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct LayerProfile {
    eps: f64,
    denom: f64,
}

impl LayerProfile {
    pub fn new(eps: f64) -> Self {
        Self { eps, denom: -(-1.0 / eps).exp_m1() }
    }

    fn layer(&self, x: f64) -> f64 {
        ((x - 1.0) / self.eps).exp()
    }

    pub fn value(&self, x: f64) -> f64 {
        -((x - 1.0) / self.eps).exp_m1() / self.denom + x - 1.0
    }

    pub fn d1(&self, x: f64) -> f64 {
        1.0 - self.layer(x) / (self.eps * self.denom)
    }

    pub fn d2(&self, x: f64) -> f64 {
        -self.layer(x) / (self.eps * self.eps * self.denom)
    }
}

/// Boundary layers along `x = 1` and `y = 1` on the unit square with
/// `u = φ(x)φ(y)`, `a = (1, 1)`, `b = 1`, `β = 1`.
pub fn example1(eps: f64) -> Result<BenchmarkProblem> {
    check_epsilon(eps)?;
    let p = LayerProfile::new(eps);
    // −εφ'' + φ' = 1, so −εΔu + a·∇u + u reduces to φ(x) + φ(y) + φ(x)φ(y).
    let mut spec = ProblemSpec::new(eps).with_constant_coefficients([1.0, 1.0], 1.0, 1.0, 1.0).with_source(
        move |x| {
            let (px, py) = (p.value(x[0]), p.value(x[1]));
            px + py + px * py
        },
        false,
    );
    spec.exact = Some(ExactSolution {
        u: Arc::new(move |x| p.value(x[0]) * p.value(x[1])),
        grad: Arc::new(move |x| [p.d1(x[0]) * p.value(x[1]), p.value(x[0]) * p.d1(x[1])]),
    });
    Ok(BenchmarkProblem {
        name: "example1".into(),
        reference: "boundary layer benchmark for effectivity and robustness studies".into(),
        spec,
        lower: [0.0, 0.0],
        upper: [1.0, 1.0],
        cells: 2,
    })
}

/// Interior and boundary layers on `(−1, 1)²` with `a = (2, 1)`, `b = 0`,
/// `f = 0`, `u = 100` on `x = 1` and `y = −1`, `u = 0` on `x = −1` and `y = 1`.
pub fn example2(eps: f64) -> Result<BenchmarkProblem> {
    check_epsilon(eps)?;
    let mut spec = ProblemSpec::new(eps).with_constant_coefficients([2.0, 1.0], 0.0, 0.0, 0.0);
    spec.dirichlet = Arc::new(|x| if x[0] >= 1.0 - 1e-14 || x[1] <= -1.0 + 1e-14 { 100.0 } else { 0.0 });
    Ok(BenchmarkProblem {
        name: "example2".into(),
        reference: "interior and boundary layer benchmark for mesh grading studies".into(),
        spec,
        lower: [-1.0, -1.0],
        upper: [1.0, 1.0],
        cells: 2,
    })
}

/// `u = sin(πx) sin(πy)` with `ε = 1`, `a = (1, 1)`, `b = 1` on the unit square.
pub fn manufactured_smooth() -> BenchmarkProblem {
    let mut spec = ProblemSpec::new(1.0).with_constant_coefficients([1.0, 1.0], 1.0, 1.0, 1.0).with_source(
        |x| {
            let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
            let (cx, cy) = ((PI * x[0]).cos(), (PI * x[1]).cos());
            2.0 * PI * PI * sx * sy + PI * cx * sy + PI * sx * cy + sx * sy
        },
        false,
    );
    spec.exact = Some(ExactSolution {
        u: Arc::new(|x| (PI * x[0]).sin() * (PI * x[1]).sin()),
        grad: Arc::new(|x| {
            [PI * (PI * x[0]).cos() * (PI * x[1]).sin(), PI * (PI * x[0]).sin() * (PI * x[1]).cos()]
        }),
    });
    BenchmarkProblem {
        name: "smooth".into(),
        reference: "smooth manufactured solution for convergence orders".into(),
        spec,
        lower: [0.0, 0.0],
        upper: [1.0, 1.0],
        cells: 2,
    }
}

pub const PROBLEM_NAMES: [&str; 3] = ["example1", "example2", "smooth"];

/// Looks up a built-in problem. `smooth` ignores `eps`.
pub fn by_name(name: &str, eps: f64) -> Result<BenchmarkProblem> {
    match name {
        "example1" => example1(eps),
        "example2" => example2(eps),
        "smooth" => Ok(manufactured_smooth()),
        _ => Err(Error::InvalidArgument(format!(
            "unknown problem '{name}' (expected one of {})",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}

/// Exact-error diagnostics against an attached exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactErrors {
    /// `‖u − u_h‖_SUPG`.
    pub supg: f64,
    /// `|||u − u_h|||_ε`.
    pub eps_triple: f64,
    /// `‖u − u_h‖_ε`.
    pub energy: f64,
    pub parts: NormParts,
    /// Degree-5 and degree-7 quadrature disagree by more than 1%.
    pub quadrature_sensitive: bool,
}

fn error_parts(u_h: &P1Function, prob: &ProblemSpec, delta: DeltaRule, exact: &ExactSolution, degree: usize) -> Result<NormParts> {
    let mesh = u_h.mesh();
    let grads: Vec<[f64; 2]> = (0..mesh.n_triangles()).map(|t| u_h.gradient(t)).collect();
    norm_parts(mesh, prob, delta, degree, |t, bary, x| {
        let g = (exact.grad)(x);
        ((exact.u)(x) - u_h.eval_bary(t, bary), [g[0] - grads[t][0], g[1] - grads[t][1]])
    })
}

pub fn exact_errors(u_h: &P1Function, prob: &ProblemSpec, delta: DeltaRule) -> Result<ExactErrors> {
    let exact = prob.exact.as_ref().ok_or(Error::MissingExactSolution)?;
    let (eps, beta) = (prob.epsilon, prob.beta);
    let parts = error_parts(u_h, prob, delta, exact, ERROR_DEGREE)?;
    let coarse = error_parts(u_h, prob, delta, exact, 5)?;
    let supg = parts.supg(eps, beta);
    let eps_triple = parts.eps_triple(eps, beta);
    let differs = |a: f64, b: f64| (a - b).abs() > 0.01 * a.abs().max(b.abs());
    Ok(ExactErrors {
        supg,
        eps_triple,
        energy: parts.energy(eps, beta),
        parts,
        quadrature_sensitive: differs(supg, coarse.supg(eps, beta)) || differs(eps_triple, coarse.eps_triple(eps, beta)),
    })
}

/// Named expressions available in problem files.
fn named_scalar(name: &str, eps: f64) -> Option<crate::fem::ScalarFn> {
    match name {
        "example1_source" => example1(eps).ok().map(|p| p.spec.source),
        "smooth_source" => Some(manufactured_smooth().spec.source),
        "example2_boundary" => example2(eps.min(1.0)).ok().map(|p| p.spec.dirichlet),
        _ => None,
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| Error::InvalidProblem(format!("{key}: '{v}' is not a number")))
}

fn parse_list(key: &str, v: &str, n: usize) -> Result<Vec<f64>> {
    let out: Vec<f64> = v.split(',').map(|s| parse_f64(key, s)).collect::<Result<_>>()?;
    if out.len() != n {
        return Err(Error::InvalidProblem(format!("{key}: expected {n} comma-separated numbers")));
    }
    Ok(out)
}

/// Reads a problem from `key = value` lines (`#` starts a comment).
///
/// Keys: `name`, `epsilon`, `domain = x0,y0,x1,y1`, `cells`, `velocity = ax,ay`,
/// `reaction`, `beta`, `c_b`, `source`, `dirichlet`, `neumann_sides` (a
/// comma list of `left`, `right`, `bottom`, `top`) and `neumann`. The
/// `source` and `dirichlet` values are either numbers or one of
/// `example1_source`, `smooth_source`, `example2_boundary`; `exact` may name
/// `example1` or `smooth`. `eps_override` replaces `epsilon` when given.
pub fn from_config(text: &str, eps_override: Option<f64>) -> Result<BenchmarkProblem> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidProblem(format!("line {}: expected key = value", lineno + 1)))?;
        entries.push((k.trim().to_string(), v.trim().to_string()));
    }
    let get = |key: &str| entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    const KNOWN: [&str; 13] = [
        "name", "epsilon", "domain", "cells", "velocity", "reaction", "beta", "c_b", "source", "dirichlet",
        "neumann_sides", "neumann", "exact",
    ];
    if let Some((k, _)) = entries.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
        return Err(Error::InvalidProblem(format!("unknown key '{k}'")));
    }

    let eps = match eps_override {
        Some(e) => e,
        None => parse_f64("epsilon", get("epsilon").ok_or_else(|| Error::InvalidProblem("missing epsilon".into()))?)?,
    };
    if !(eps > 0.0) {
        return Err(Error::InvalidProblem(format!("epsilon must be positive, got {eps}")));
    }
    let domain = match get("domain") {
        Some(v) => parse_list("domain", v, 4)?,
        None => vec![0.0, 0.0, 1.0, 1.0],
    };
    let (lower, upper) = ([domain[0], domain[1]], [domain[2], domain[3]]);
    let cells = match get("cells") {
        Some(v) => v.parse().map_err(|_| Error::InvalidProblem(format!("cells: '{v}' is not a count")))?,
        None => 2,
    };
    let a = match get("velocity") {
        Some(v) => parse_list("velocity", v, 2)?,
        None => vec![0.0, 0.0],
    };
    let b = get("reaction").map(|v| parse_f64("reaction", v)).transpose()?.unwrap_or(0.0);
    let beta = get("beta").map(|v| parse_f64("beta", v)).transpose()?.unwrap_or(b);
    let c_b = get("c_b").map(|v| parse_f64("c_b", v)).transpose()?.unwrap_or(if beta > 0.0 { b.abs() / beta } else { 0.0 });
    let mut spec = ProblemSpec::new(eps).with_constant_coefficients([a[0], a[1]], b, beta, c_b);

    let scalar = |key: &str, v: &str| -> Result<(crate::fem::ScalarFn, bool)> {
        if let Ok(c) = v.parse::<f64>() {
            return Ok((Arc::new(move |_| c), true));
        }
        named_scalar(v, eps)
            .map(|f| (f, false))
            .ok_or_else(|| Error::InvalidProblem(format!("{key}: unknown expression '{v}'")))
    };
    if let Some(v) = get("source") {
        let (f, affine) = scalar("source", v)?;
        spec.source = f;
        spec.affine_data &= affine;
    }
    if let Some(v) = get("dirichlet") {
        spec.dirichlet = scalar("dirichlet", v)?.0;
    }
    if let Some(v) = get("neumann") {
        let g = parse_f64("neumann", v)?;
        spec.neumann = Arc::new(move |_, _| g);
    }
    if let Some(v) = get("neumann_sides") {
        let tol = 1e-12 * (upper[0] - lower[0]).abs().max((upper[1] - lower[1]).abs());
        let mut sides = [false; 4];
        for s in v.split(',').map(str::trim) {
            let i = ["left", "right", "bottom", "top"]
                .iter()
                .position(|n| *n == s)
                .ok_or_else(|| Error::InvalidProblem(format!("neumann_sides: unknown side '{s}'")))?;
            sides[i] = true;
        }
        spec.boundary = Arc::new(move |x| {
            let on = [
                (x[0] - lower[0]).abs() <= tol,
                (x[0] - upper[0]).abs() <= tol,
                (x[1] - lower[1]).abs() <= tol,
                (x[1] - upper[1]).abs() <= tol,
            ];
            if (0..4).any(|i| on[i] && sides[i]) {
                BoundaryTag::Neumann
            } else {
                BoundaryTag::Dirichlet
            }
        });
    }
    if let Some(v) = get("exact") {
        spec.exact = match v {
            "example1" => example1(eps)?.spec.exact,
            "smooth" => manufactured_smooth().spec.exact,
            _ => return Err(Error::InvalidProblem(format!("exact: unknown solution '{v}'"))),
        };
    }
    let problem = BenchmarkProblem {
        name: get("name").unwrap_or("custom").to_string(),
        reference: "user-defined problem file".into(),
        spec,
        lower,
        upper,
        cells,
    };
    let mesh = problem.initial_mesh()?;
    problem.spec.validate(&mesh)?;
    Ok(problem)
}
