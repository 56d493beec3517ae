//! Weights, residuals and the recovery-based error estimator, together with
//! the edge-jump estimator and data oscillation.

use crate::error::{Error, Result};
use crate::fem::{P1Function, ProblemSpec};
use crate::linalg::{quad_edge, quad_triangle};
use crate::mesh::{BoundaryTag, Mesh, Point};
use crate::recovery::{cell_residual_at, FluxField, RecoveryKind};

/// `α_K = min{h_K ε^{−1/2}, β^{−1/2}, h_K^{1/2}}`; the β term is absent when β = 0.
pub fn alpha_k(h: f64, eps: f64, beta: f64) -> f64 {
    let mut a = (h / eps.sqrt()).min(h.sqrt());
    if beta > 0.0 {
        a = a.min(1.0 / beta.sqrt());
    }
    a
}

/// `α_e = min{h_e^{1/2} ε^{−1/2}, ε^{−1/4} β^{−1/4}, 1}`; the β term is absent when β = 0.
pub fn alpha_e(h: f64, eps: f64, beta: f64) -> f64 {
    let mut a = (h / eps).sqrt().min(1.0);
    if beta > 0.0 {
        a = a.min(1.0 / (eps * beta).sqrt().sqrt());
    }
    a
}

fn edge_point(mesh: &Mesh, e: usize, s: f64) -> Point {
    let [a, b] = mesh.edge_points(e);
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Element norms `(‖R_K‖_K, ‖R̃_K‖_K)` with `R_K = f − a·∇u_h − b u_h`
/// (the Laplacian of a P1 function vanishes) and `R̃_K = R_K − ∇·σ_h`.
pub fn cell_residuals(u_h: &P1Function, sigma: &FluxField, prob: &ProblemSpec) -> Result<Vec<(f64, f64)>> {
    let mesh = u_h.mesh();
    let rule = quad_triangle(prob.residual_degree())?;
    Ok((0..mesh.n_triangles())
        .map(|t| {
            let div = sigma.divergence(t);
            let area = mesh.area(t);
            let (mut r2, mut rt2) = (0.0, 0.0);
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let x = mesh.map_point(t, *bary);
                let r = cell_residual_at(u_h, prob, t, *bary, x);
                let w = 2.0 * area * w;
                r2 += w * r * r;
                rt2 += w * (r - div) * (r - div);
            }
            (r2.sqrt(), rt2.sqrt())
        })
        .collect())
}

/// Per-element `‖ε^{1/2}∇u_h + ε^{−1/2}σ_h‖_K`, integrated exactly.
pub fn flux_mismatch(u_h: &P1Function, sigma: &FluxField, eps: f64) -> Vec<f64> {
    let mesh = u_h.mesh();
    let rule = quad_triangle(2).expect("degree 2 rule");
    (0..mesh.n_triangles())
        .map(|t| {
            let g = u_h.gradient(t);
            let field = sigma.element_field(t);
            let area = mesh.area(t);
            let s: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(bary, w)| {
                    let v = field.eval(mesh.map_point(t, *bary));
                    let d = [eps * g[0] + v[0], eps * g[1] + v[1]];
                    2.0 * area * w * (d[0] * d[0] + d[1] * d[1])
                })
                .sum();
            (s / eps).sqrt()
        })
        .collect()
}

/// Global `‖ε^{1/2}∇u_h + ε^{−1/2}σ_h‖`.
pub fn flux_mismatch_total(u_h: &P1Function, sigma: &FluxField, eps: f64) -> f64 {
    flux_mismatch(u_h, sigma, eps).iter().map(|m| m * m).sum::<f64>().sqrt()
}

/// Unweighted boundary terms on one Neumann edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannTerm {
    pub edge: usize,
    pub alpha: f64,
    /// `‖g − ε∇u_h·n‖_e`.
    pub data: f64,
    /// `‖(σ_h + ε∇u_h)·n‖_e`; zero for the explicit recovery.
    pub recovery: f64,
}

impl NeumannTerm {
    /// `α_e²(data² + recovery²)`.
    pub fn weighted_sq(&self) -> f64 {
        self.alpha * self.alpha * (self.data * self.data + self.recovery * self.recovery)
    }
}

pub fn neumann_terms(
    u_h: &P1Function,
    sigma: &FluxField,
    prob: &ProblemSpec,
    kind: RecoveryKind,
) -> Result<Vec<NeumannTerm>> {
    let mesh = u_h.mesh();
    let data_rule = quad_edge(if prob.affine_data { 2 } else { 6 })?;
    let flux_rule = quad_edge(2)?;
    let eps = prob.epsilon;
    let mut out = Vec::new();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.tag != Some(BoundaryTag::Neumann) {
            continue;
        }
        let t = edge.plus;
        let n = mesh.edge_normal(e);
        let g = u_h.gradient(t);
        let dudn = eps * (g[0] * n[0] + g[1] * n[1]);
        let len = mesh.edge_length(e);
        let data: f64 = data_rule
            .points
            .iter()
            .zip(&data_rule.weights)
            .map(|(s, w)| {
                let d = (prob.neumann)(edge_point(mesh, e, *s), n) - dudn;
                w * len * d * d
            })
            .sum();
        let recovery = if kind.is_explicit() {
            0.0
        } else {
            flux_rule
                .points
                .iter()
                .zip(&flux_rule.weights)
                .map(|(s, w)| {
                    let d = sigma.normal_component(t, e, *s) + dudn;
                    w * len * d * d
                })
                .sum::<f64>()
                .sqrt()
        };
        out.push(NeumannTerm { edge: e, alpha: alpha_e(len, eps, prob.beta), data: data.sqrt(), recovery });
    }
    Ok(out)
}

/// `‖R_e‖_e` for every edge, with `τ = −ε∇u_h`: the jump `(τ|_{K+} − τ|_{K−})·n_e`
/// inside, `g + τ·n_e` on Γ_N and zero on Γ_D.
pub fn edge_residual_jump(u_h: &P1Function, prob: &ProblemSpec) -> Result<Vec<f64>> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let rule = quad_edge(if prob.affine_data { 2 } else { 6 })?;
    let tau_n = |t: usize, n: [f64; 2]| {
        let g = u_h.gradient(t);
        -eps * (g[0] * n[0] + g[1] * n[1])
    };
    Ok(mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let n = mesh.edge_normal(e);
            let len = mesh.edge_length(e);
            match (edge.minus, edge.tag) {
                (Some(m), _) => (tau_n(edge.plus, n) - tau_n(m, n)).abs() * len.sqrt(),
                (None, Some(BoundaryTag::Neumann)) => {
                    let tn = tau_n(edge.plus, n);
                    rule.points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(s, w)| {
                            let r = (prob.neumann)(edge_point(mesh, e, *s), n) + tn;
                            w * len * r * r
                        })
                        .sum::<f64>()
                        .sqrt()
                }
                _ => 0.0,
            }
        })
        .collect())
}

/// `(Σ_e α_e² ‖R_e‖_e²)^{1/2}` over all edges.
pub fn jump_estimator(u_h: &P1Function, prob: &ProblemSpec) -> Result<f64> {
    let mesh = u_h.mesh();
    let r = edge_residual_jump(u_h, prob)?;
    Ok(r
        .iter()
        .enumerate()
        .map(|(e, re)| {
            let a = alpha_e(mesh.edge_length(e), prob.epsilon, prob.beta);
            a * a * re * re
        })
        .sum::<f64>()
        .sqrt())
}

/// Data oscillation with local L² projections onto `P_k`, `k ∈ {0, 1}`:
/// `osc² = Σ_K α_K² ‖R_K − Π_k R_K‖_K² + Σ_{e⊂Γ_N} α_e² ‖R_e − Π_k R_e‖_e²`.
pub fn oscillation(u_h: &P1Function, prob: &ProblemSpec, k: usize) -> Result<f64> {
    if k > 1 {
        return Err(Error::UnsupportedDegree(k));
    }
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let rule = quad_triangle(prob.residual_degree().max(2))?;
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        let vals: Vec<f64> = rule
            .points
            .iter()
            .map(|b| cell_residual_at(u_h, prob, t, *b, mesh.map_point(t, *b)))
            .collect();
        // Moments against the barycentric coordinates (or the constant).
        let proj: Vec<f64> = if k == 0 {
            let mean = vals.iter().zip(&rule.weights).map(|(v, w)| 2.0 * v * w).sum::<f64>();
            vec![mean; vals.len()]
        } else {
            let mut mom = [0.0; 3];
            for ((b, w), v) in rule.points.iter().zip(&rule.weights).zip(&vals) {
                for i in 0..3 {
                    mom[i] += 2.0 * area * w * v * b[i];
                }
            }
            // Inverse of the P1 mass matrix (|K|/12)(1 + δ_ij).
            let s: f64 = mom.iter().sum();
            let c: [f64; 3] = std::array::from_fn(|i| (3.0 / area) * (4.0 * mom[i] - s));
            rule.points.iter().map(|b| c[0] * b[0] + c[1] * b[1] + c[2] * b[2]).collect()
        };
        let d2: f64 =
            vals.iter().zip(&proj).zip(&rule.weights).map(|((v, p), w)| 2.0 * area * w * (v - p) * (v - p)).sum();
        let a = alpha_k(mesh.diameter(t), eps, prob.beta);
        total += a * a * d2;
    }
    let edge_rule = quad_edge(6)?;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.tag != Some(BoundaryTag::Neumann) {
            continue;
        }
        let n = mesh.edge_normal(e);
        let g = u_h.gradient(edge.plus);
        let tn = -eps * (g[0] * n[0] + g[1] * n[1]);
        let vals: Vec<f64> =
            edge_rule.points.iter().map(|s| (prob.neumann)(edge_point(mesh, e, *s), n) + tn).collect();
        // Orthogonal basis 1, 2s − 1 on [0, 1] with squared norms 1 and 1/3.
        let m0: f64 = vals.iter().zip(&edge_rule.weights).map(|(v, w)| v * w).sum();
        let m1: f64 = if k == 1 {
            3.0 * vals.iter().zip(&edge_rule.weights).zip(&edge_rule.points).map(|((v, w), s)| v * w * (2.0 * s - 1.0)).sum::<f64>()
        } else {
            0.0
        };
        let len = mesh.edge_length(e);
        let d2: f64 = vals
            .iter()
            .zip(&edge_rule.weights)
            .zip(&edge_rule.points)
            .map(|((v, w), s)| {
                let d = v - m0 - m1 * (2.0 * s - 1.0);
                w * len * d * d
            })
            .sum();
        let a = alpha_e(len, eps, prob.beta);
        total += a * a * d2;
    }
    Ok(total.sqrt())
}

/// Per-element and global estimator quantities for one solution and flux.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub alpha_k: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_tilde: Vec<f64>,
    pub mismatch: Vec<f64>,
    /// Local indicators, with each Neumann edge term assigned to its element.
    pub eta_k: Vec<f64>,
    pub neumann: Vec<NeumannTerm>,
    /// `(Σ α_K²(‖R_K‖² + ‖R̃_K‖²) + ‖ε^{1/2}∇u_h + ε^{−1/2}σ_h‖²)^{1/2}`.
    pub phi: f64,
    /// `(Φ² + Σ_{e⊂Γ_N} α_e²(data² + recovery²))^{1/2}`.
    pub eta: f64,
    pub osc: f64,
    pub jump_estimator: f64,
}

impl EstimatorReport {
    /// `Σ_K α_K² ‖R_K‖_K²`.
    pub fn weighted_residual_sq(&self) -> f64 {
        self.alpha_k.iter().zip(&self.residual).map(|(a, r)| a * a * r * r).sum()
    }

    /// `Σ_K α_K² ‖R̃_K‖_K²`.
    pub fn weighted_residual_tilde_sq(&self) -> f64 {
        self.alpha_k.iter().zip(&self.residual_tilde).map(|(a, r)| a * a * r * r).sum()
    }

    pub fn mismatch_total(&self) -> f64 {
        self.mismatch.iter().map(|m| m * m).sum::<f64>().sqrt()
    }
}

pub fn assemble_report(
    u_h: &P1Function,
    sigma: &FluxField,
    prob: &ProblemSpec,
    kind: RecoveryKind,
) -> Result<EstimatorReport> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let alpha: Vec<f64> = (0..mesh.n_triangles()).map(|t| alpha_k(mesh.diameter(t), eps, prob.beta)).collect();
    let (residual, residual_tilde): (Vec<f64>, Vec<f64>) = cell_residuals(u_h, sigma, prob)?.into_iter().unzip();
    let mismatch = flux_mismatch(u_h, sigma, eps);
    let neumann = neumann_terms(u_h, sigma, prob, kind)?;

    let mut eta_sq: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| {
            alpha[t] * alpha[t] * (residual[t] * residual[t] + residual_tilde[t] * residual_tilde[t])
                + mismatch[t] * mismatch[t]
        })
        .collect();
    let phi_sq: f64 = eta_sq.iter().sum();
    let mut neumann_sq = 0.0;
    for term in &neumann {
        let w = term.weighted_sq();
        eta_sq[mesh.edge(term.edge).plus] += w;
        neumann_sq += w;
    }
    Ok(EstimatorReport {
        alpha_k: alpha,
        residual,
        residual_tilde,
        mismatch,
        eta_k: eta_sq.iter().map(|v| v.sqrt()).collect(),
        neumann,
        phi: phi_sq.sqrt(),
        eta: (phi_sq + neumann_sq).sqrt(),
        osc: oscillation(u_h, prob, 1)?,
        jump_estimator: jump_estimator(u_h, prob)?,
    })
}

/// Observed constants of the structural inequalities behind robustness.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObservedConstants {
    /// `Σα_K²‖R̃_K‖² / (2Σα_K²‖R_K‖² + ‖ε^{1/2}∇u_h + ε^{−1/2}σ_h‖²)`.
    pub residual: f64,
    /// `Σ_{e⊂Γ} α_e²‖(σ_h + ε∇u_h)·n‖_e² / ‖ε^{−1/2}σ_h + ε^{1/2}∇u_h‖²`.
    pub trace: f64,
    /// `max_K ‖ε^{−1/2}σ̂ + ε^{1/2}∇u_h‖_K² / Σ_{e⊂∂K interior} α_e²‖R_e‖_e²`,
    /// with `σ̂` the explicit recovery.
    pub explicit: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Observed constants for a solution, its recovered flux and report. The
/// trace ratio runs over every boundary edge so that it is defined on pure
/// Dirichlet problems too.
pub fn observed_constants(
    u_h: &P1Function,
    sigma: &FluxField,
    report: &EstimatorReport,
    prob: &ProblemSpec,
) -> Result<ObservedConstants> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let m2 = report.mismatch.iter().map(|m| m * m).sum::<f64>();
    let residual = ratio(report.weighted_residual_tilde_sq(), 2.0 * report.weighted_residual_sq() + m2);

    let rule = quad_edge(2)?;
    let mut trace_sum = 0.0;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.minus.is_some() {
            continue;
        }
        let n = mesh.edge_normal(e);
        let g = u_h.gradient(edge.plus);
        let dudn = eps * (g[0] * n[0] + g[1] * n[1]);
        let len = mesh.edge_length(e);
        let s: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(s, w)| {
                let d = sigma.normal_component(edge.plus, e, *s) + dudn;
                w * len * d * d
            })
            .sum();
        let a = alpha_e(len, eps, prob.beta);
        trace_sum += a * a * s;
    }
    let trace = ratio(trace_sum, m2);

    let explicit_flux = crate::recovery::recover_explicit_rt0(u_h, prob)?;
    let local = flux_mismatch(u_h, &explicit_flux, eps);
    let jumps = edge_residual_jump(u_h, prob)?;
    let mut explicit: f64 = 0.0;
    for t in 0..mesh.n_triangles() {
        let den: f64 = mesh
            .tri_edges(t)
            .iter()
            .filter(|&&e| mesh.edge(e).minus.is_some())
            .map(|&e| {
                let a = alpha_e(mesh.edge_length(e), eps, prob.beta);
                a * a * jumps[e] * jumps[e]
            })
            .sum();
        explicit = explicit.max(ratio(local[t] * local[t], den));
    }
    Ok(ObservedConstants { residual, trace, explicit })
}
