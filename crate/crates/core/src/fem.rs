//! Problem data, the continuous P1 space, SUPG assembly and solve, and the
//! ε-weighted norms used to measure errors.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{quad_edge, quad_triangle, solve_general, CooMatrix, CsrMatrix, SUPG_TOL};
use crate::mesh::{BoundaryTag, Mesh, Point};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
/// Boundary datum evaluated at a point with the outward unit normal there.
pub type NormalFn = Arc<dyn Fn(Point, [f64; 2]) -> f64 + Send + Sync>;
pub type BoundaryFn = Arc<dyn Fn(Point) -> BoundaryTag + Send + Sync>;

/// Quadrature degree for exact-error norms.
pub const ERROR_DEGREE: usize = 7;

#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub grad: VectorFn,
}

/// Data of `-εΔu + a·∇u + b u = f`, `u = u_D` on Γ_D, `ε ∂u/∂n = g` on Γ_N.
#[derive(Clone)]
pub struct ProblemSpec {
    pub epsilon: f64,
    pub velocity: VectorFn,
    pub velocity_divergence: ScalarFn,
    pub reaction: ScalarFn,
    pub source: ScalarFn,
    pub neumann: NormalFn,
    pub dirichlet: ScalarFn,
    /// Classifies a boundary edge by its midpoint.
    pub boundary: BoundaryFn,
    /// `b − ½∇·a ≥ β`.
    pub beta: f64,
    /// `‖b‖∞ ≤ c_b β`.
    pub c_b: f64,
    pub exact: Option<ExactSolution>,
    /// Constant coefficients and an affine source; lowers the quadrature
    /// degrees of assembly and residuals to 2.
    pub affine_data: bool,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("epsilon", &self.epsilon)
            .field("beta", &self.beta)
            .field("c_b", &self.c_b)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Pure diffusion with zero data and a Dirichlet boundary everywhere.
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            velocity: Arc::new(|_| [0.0, 0.0]),
            velocity_divergence: Arc::new(|_| 0.0),
            reaction: Arc::new(|_| 0.0),
            source: Arc::new(|_| 0.0),
            neumann: Arc::new(|_, _| 0.0),
            dirichlet: Arc::new(|_| 0.0),
            boundary: Arc::new(|_| BoundaryTag::Dirichlet),
            beta: 0.0,
            c_b: 0.0,
            exact: None,
            affine_data: true,
        }
    }

    /// Constant velocity, reaction and coefficient bounds.
    pub fn with_constant_coefficients(mut self, a: [f64; 2], b: f64, beta: f64, c_b: f64) -> Self {
        self.velocity = Arc::new(move |_| a);
        self.velocity_divergence = Arc::new(|_| 0.0);
        self.reaction = Arc::new(move |_| b);
        self.beta = beta;
        self.c_b = c_b;
        self
    }

    pub fn with_source(mut self, f: impl Fn(Point) -> f64 + Send + Sync + 'static, affine: bool) -> Self {
        self.source = Arc::new(f);
        self.affine_data &= affine;
        self
    }

    pub fn assembly_degree(&self) -> usize {
        if self.affine_data {
            2
        } else {
            4
        }
    }

    /// Degree for integrating squared cell residuals and residual moments.
    pub fn residual_degree(&self) -> usize {
        if self.affine_data {
            2
        } else {
            6
        }
    }

    /// Checks `ε > 0` and the coefficient assumptions at the assembly
    /// quadrature points of every element.
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidProblem(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.beta < 0.0 || self.c_b < 0.0 {
            return Err(Error::InvalidProblem("beta and c_b must be nonnegative".into()));
        }
        let rule = quad_triangle(self.assembly_degree())?;
        for t in 0..mesh.n_triangles() {
            for bary in &rule.points {
                let x = mesh.map_point(t, *bary);
                let b = (self.reaction)(x);
                let lower = b - 0.5 * (self.velocity_divergence)(x);
                if lower < self.beta - 1e-10 {
                    return Err(Error::InvalidProblem(format!(
                        "b - div(a)/2 = {lower} < beta = {} at {x:?}",
                        self.beta
                    )));
                }
                if b.abs() > self.c_b * self.beta + 1e-10 {
                    return Err(Error::InvalidProblem(format!("|b| = {} exceeds c_b*beta at {x:?}", b.abs())));
                }
            }
        }
        Ok(())
    }
}

/// SUPG parameter `δ_K = c_δ h_K`; `c_δ = 0` is the Galerkin method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRule {
    pub c_delta: f64,
}

impl DeltaRule {
    pub fn new(c_delta: f64) -> Self {
        Self { c_delta }
    }

    pub fn galerkin() -> Self {
        Self { c_delta: 0.0 }
    }

    pub fn delta(&self, h: f64) -> f64 {
        self.c_delta * h
    }
}

/// Continuous piecewise-linear function given by its vertex values.
#[derive(Debug, Clone)]
pub struct P1Function<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

impl<'m> P1Function<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_vertices() {
            return Err(Error::InvalidArgument(format!(
                "{} nodal values for {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zero(mesh: &'m Mesh) -> Self {
        Self { mesh, values: vec![0.0; mesh.n_vertices()] }
    }

    pub fn interpolate(mesh: &'m Mesh, f: impl Fn(Point) -> f64) -> Self {
        Self { mesh, values: mesh.vertices().iter().map(|&p| f(p)).collect() }
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value on triangle `t` at barycentric coordinates `bary`.
    pub fn eval_bary(&self, t: usize, bary: [f64; 3]) -> f64 {
        let tri = self.mesh.triangle(t);
        (0..3).map(|i| bary[i] * self.values[tri[i]]).sum()
    }

    pub fn eval(&self, t: usize, x: Point) -> f64 {
        self.eval_bary(t, self.mesh.barycentric(t, x))
    }

    /// Constant gradient on triangle `t`.
    pub fn gradient(&self, t: usize) -> [f64; 2] {
        let tri = self.mesh.triangle(t);
        let g = self.mesh.barycentric_gradients(t);
        let mut out = [0.0; 2];
        for i in 0..3 {
            out[0] += self.values[tri[i]] * g[i][0];
            out[1] += self.values[tri[i]] * g[i][1];
        }
        out
    }
}

/// Nodal Dirichlet values. A vertex where the one-sided limits of the data
/// along its incident Dirichlet edges disagree receives their average.
#[derive(Debug, Clone)]
pub struct DirichletValues {
    pub values: Vec<Option<f64>>,
    /// Vertices where the averaging rule was applied.
    pub corner_conflicts: Vec<usize>,
}

/// Fraction of an incident edge used to sample one-sided boundary limits.
const LIMIT_OFFSET: f64 = 1e-6;

pub fn dirichlet_values(mesh: &Mesh, prob: &ProblemSpec) -> DirichletValues {
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for edge in mesh.edges() {
        if edge.tag == Some(BoundaryTag::Dirichlet) {
            let [a, b] = edge.vertices;
            incident.entry(a).or_default().push(b);
            incident.entry(b).or_default().push(a);
        }
    }
    let mut values = vec![None; mesh.n_vertices()];
    let mut corner_conflicts = Vec::new();
    for (v, others) in incident {
        let p = mesh.vertex(v);
        let here = (prob.dirichlet)(p);
        let limits: Vec<f64> = others
            .iter()
            .map(|&w| {
                let q = mesh.vertex(w);
                (prob.dirichlet)([p[0] + LIMIT_OFFSET * (q[0] - p[0]), p[1] + LIMIT_OFFSET * (q[1] - p[1])])
            })
            .collect();
        let lo = limits.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = limits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 1e-4 * (1.0 + lo.abs().max(hi.abs())) {
            corner_conflicts.push(v);
            values[v] = Some(limits.iter().sum::<f64>() / limits.len() as f64);
        } else {
            values[v] = Some(here);
        }
    }
    DirichletValues { values, corner_conflicts }
}

/// The assembled SUPG system over the non-Dirichlet vertices.
#[derive(Debug, Clone)]
pub struct SupgSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Unknown index of each vertex; `None` on Γ_D.
    pub unknown: Vec<Option<usize>>,
    pub dirichlet: DirichletValues,
    /// `max_K δ_K ‖a‖_{L∞(K)} / h_K`.
    pub delta_ratio: f64,
}

impl SupgSystem {
    pub fn n_unknowns(&self) -> usize {
        self.rhs.len()
    }

    /// Full nodal vector from a solution of the reduced system.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.unknown
            .iter()
            .zip(&self.dirichlet.values)
            .map(|(u, d)| match (u, d) {
                (Some(i), _) => x[*i],
                (None, Some(v)) => *v,
                (None, None) => 0.0,
            })
            .collect()
    }
}

/// Local SUPG element matrix and load vector on triangle `t`:
/// `ε(∇φ_j,∇φ_i) + (a·∇φ_j + bφ_j, φ_i) + δ_K(−εΔφ_j + a·∇φ_j + bφ_j, a·∇φ_i)`
/// and `(f, φ_i) + δ_K(f, a·∇φ_i)`. Also returns `‖a‖_{L∞(K)}` over the
/// quadrature points.
pub fn element_system(
    mesh: &Mesh,
    prob: &ProblemSpec,
    delta: DeltaRule,
    t: usize,
    rule: &crate::linalg::TriangleRule,
) -> ([[f64; 3]; 3], [f64; 3], f64) {
    let eps = prob.epsilon;
    let grads = mesh.barycentric_gradients(t);
    let area = mesh.area(t);
    let delta_k = delta.delta(mesh.diameter(t));
    // P1 functions have zero Laplacian on each element.
    let laplacian = [0.0; 3];
    let mut ke = [[0.0; 3]; 3];
    let mut fe = [0.0; 3];
    let mut a_max: f64 = 0.0;
    for (bary, w) in rule.points.iter().zip(&rule.weights) {
        let x = mesh.map_point(t, *bary);
        let w = 2.0 * area * w;
        let a = (prob.velocity)(x);
        let b = (prob.reaction)(x);
        let f = (prob.source)(x);
        a_max = a_max.max(a[0].hypot(a[1]));
        let adv: [f64; 3] = std::array::from_fn(|i| a[0] * grads[i][0] + a[1] * grads[i][1]);
        for i in 0..3 {
            for j in 0..3 {
                let diffusion = eps * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                let galerkin = adv[j] * bary[i] + b * bary[j] * bary[i];
                let stab = delta_k * (-eps * laplacian[j] + adv[j] + b * bary[j]) * adv[i];
                ke[i][j] += w * (diffusion + galerkin + stab);
            }
            fe[i] += w * (f * bary[i] + delta_k * f * adv[i]);
        }
    }
    (ke, fe, a_max)
}

pub fn assemble_supg(mesh: &Mesh, prob: &ProblemSpec, delta: DeltaRule) -> Result<SupgSystem> {
    if delta.c_delta < 0.0 || !delta.c_delta.is_finite() {
        return Err(Error::InvalidArgument(format!("SUPG constant must be nonnegative, got {}", delta.c_delta)));
    }
    prob.validate(mesh)?;
    let dirichlet = dirichlet_values(mesh, prob);
    if dirichlet.values.iter().all(Option::is_none) {
        return Err(Error::InvalidProblem("no Dirichlet vertices".into()));
    }
    let mut unknown = vec![None; mesh.n_vertices()];
    let mut n = 0;
    for (v, d) in dirichlet.values.iter().enumerate() {
        if d.is_none() {
            unknown[v] = Some(n);
            n += 1;
        }
    }

    let rule = quad_triangle(prob.assembly_degree())?;
    let mut coo = CooMatrix::with_capacity(n, n, 9 * mesh.n_triangles());
    let mut rhs = vec![0.0; n];
    let mut delta_ratio: f64 = 0.0;
    for t in 0..mesh.n_triangles() {
        let (ke, fe, a_max) = element_system(mesh, prob, delta, t, &rule);
        let h = mesh.diameter(t);
        delta_ratio = delta_ratio.max(delta.delta(h) * a_max / h);
        let tri = mesh.triangle(t);
        for i in 0..3 {
            let Some(row) = unknown[tri[i]] else { continue };
            rhs[row] += fe[i];
            for j in 0..3 {
                match unknown[tri[j]] {
                    Some(col) => coo.push(row, col, ke[i][j]),
                    None => rhs[row] -= ke[i][j] * dirichlet.values[tri[j]].unwrap(),
                }
            }
        }
    }

    let edge_rule = quad_edge(prob.assembly_degree())?;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.tag != Some(BoundaryTag::Neumann) {
            continue;
        }
        let [pa, pb] = mesh.edge_points(e);
        let n_e = mesh.edge_normal(e);
        let len = mesh.edge_length(e);
        for (s, w) in edge_rule.points.iter().zip(&edge_rule.weights) {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let g = (prob.neumann)(x, n_e);
            for (v, phi) in [(edge.vertices[0], 1.0 - s), (edge.vertices[1], *s)] {
                if let Some(row) = unknown[v] {
                    rhs[row] += w * len * g * phi;
                }
            }
        }
    }

    Ok(SupgSystem { matrix: coo.to_csr(), rhs, unknown, dirichlet, delta_ratio })
}

/// Solves the SUPG problem: find `u_h ∈ V_h` with `B_δ(u_h, v_h) = l_δ(v_h)`.
pub fn solve<'m>(mesh: &'m Mesh, prob: &ProblemSpec, delta: DeltaRule) -> Result<P1Function<'m>> {
    let sys = assemble_supg(mesh, prob, delta)?;
    solve_system(mesh, &sys)
}

pub fn solve_system<'m>(mesh: &'m Mesh, sys: &SupgSystem) -> Result<P1Function<'m>> {
    let x = if sys.n_unknowns() == 0 { Vec::new() } else { solve_general(&sys.matrix, &sys.rhs, SUPG_TOL)? };
    P1Function::new(mesh, sys.expand(&x))
}

/// Squared pieces of the norms used for errors:
/// `|v|₁²`, `‖v‖²`, `Σ_K δ_K ‖a·∇v‖_K²` and `‖h^{1/2}∇v‖²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NormParts {
    pub grad_sq: f64,
    pub l2_sq: f64,
    pub streamline_sq: f64,
    pub h_grad_sq: f64,
}

impl NormParts {
    /// `‖v‖_ε = (ε|v|₁² + β‖v‖²)^{1/2}`.
    pub fn energy(&self, eps: f64, beta: f64) -> f64 {
        (eps * self.grad_sq + beta * self.l2_sq).sqrt()
    }

    /// `(‖v‖_ε² + Σ_K δ_K‖a·∇v‖_K²)^{1/2}`.
    pub fn supg(&self, eps: f64, beta: f64) -> f64 {
        (eps * self.grad_sq + beta * self.l2_sq + self.streamline_sq).sqrt()
    }

    /// `|||v|||_ε = ‖v‖_ε + ‖h^{1/2}∇v‖`, `h` the element diameter.
    pub fn eps_triple(&self, eps: f64, beta: f64) -> f64 {
        self.energy(eps, beta) + self.h_grad_sq.sqrt()
    }
}

/// Integrates the norm pieces of a field given pointwise on each triangle as
/// `(value, gradient)`.
pub fn norm_parts(
    mesh: &Mesh,
    prob: &ProblemSpec,
    delta: DeltaRule,
    degree: usize,
    field: impl Fn(usize, [f64; 3], Point) -> (f64, [f64; 2]),
) -> Result<NormParts> {
    let rule = quad_triangle(degree)?;
    let mut parts = NormParts::default();
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        let h = mesh.diameter(t);
        let delta_k = delta.delta(h);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.map_point(t, *bary);
            let w = 2.0 * area * w;
            let (v, g) = field(t, *bary, x);
            let a = (prob.velocity)(x);
            let g2 = g[0] * g[0] + g[1] * g[1];
            let ag = a[0] * g[0] + a[1] * g[1];
            parts.grad_sq += w * g2;
            parts.l2_sq += w * v * v;
            parts.streamline_sq += w * delta_k * ag * ag;
            parts.h_grad_sq += w * h * g2;
        }
    }
    Ok(parts)
}

fn p1_parts(v: &P1Function, prob: &ProblemSpec, delta: DeltaRule) -> Result<NormParts> {
    let mesh = v.mesh();
    let grads: Vec<[f64; 2]> = (0..mesh.n_triangles()).map(|t| v.gradient(t)).collect();
    norm_parts(mesh, prob, delta, ERROR_DEGREE, |t, bary, _| (v.eval_bary(t, bary), grads[t]))
}

/// `‖v‖_ε`.
pub fn norm_energy(v: &P1Function, prob: &ProblemSpec) -> Result<f64> {
    Ok(p1_parts(v, prob, DeltaRule::galerkin())?.energy(prob.epsilon, prob.beta))
}

pub fn norm_supg(v: &P1Function, prob: &ProblemSpec, delta: DeltaRule) -> Result<f64> {
    Ok(p1_parts(v, prob, delta)?.supg(prob.epsilon, prob.beta))
}

pub fn norm_eps_triple(v: &P1Function, prob: &ProblemSpec) -> Result<f64> {
    Ok(p1_parts(v, prob, DeltaRule::galerkin())?.eps_triple(prob.epsilon, prob.beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Mesh {
        Mesh::square([0.0, 0.0], [1.0, 1.0], n, |_| BoundaryTag::Dirichlet).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let m = unit(3);
        let p = ProblemSpec::new(0.1).with_constant_coefficients([1.0, 0.5], 1.0, 1.0, 1.0);
        let u = solve(&m, &p, DeltaRule::new(1.0)).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_of_coordinate() {
        let m = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], |_| BoundaryTag::Dirichlet)
            .unwrap();
        let u = P1Function::interpolate(&m, |p| p[0]);
        assert_eq!(u.gradient(0), [1.0, 0.0]);
        let c = P1Function::interpolate(&m, |_| 3.0);
        assert_eq!(c.gradient(0), [0.0, 0.0]);
    }

    #[test]
    fn energy_norm_of_x() {
        let m = unit(4);
        let p = ProblemSpec::new(1.0).with_constant_coefficients([0.0, 0.0], 1.0, 1.0, 1.0);
        let v = P1Function::interpolate(&m, |x| x[0]);
        let n = norm_energy(&v, &p).unwrap();
        assert!((n - (1.0f64 + 1.0 / 3.0).sqrt()).abs() < 1e-13);
        let z = P1Function::zero(&m);
        assert_eq!(norm_energy(&z, &p).unwrap(), 0.0);
        assert_eq!(norm_supg(&z, &p, DeltaRule::new(4.0)).unwrap(), 0.0);
        assert_eq!(norm_eps_triple(&z, &p).unwrap(), 0.0);
    }

    #[test]
    fn assumption_violation_detected() {
        let m = unit(2);
        let p = ProblemSpec::new(1.0).with_constant_coefficients([1.0, 1.0], 0.5, 1.0, 1.0);
        assert!(matches!(p.validate(&m), Err(Error::InvalidProblem(_))));
        let p = ProblemSpec::new(0.0);
        assert!(p.validate(&m).is_err());
    }

    #[test]
    fn corner_average() {
        let m = unit(2);
        let mut p = ProblemSpec::new(1.0);
        p.dirichlet = Arc::new(|x| if x[0] > 1.0 - 1e-12 { 100.0 } else { 0.0 });
        let d = dirichlet_values(&m, &p);
        // (1,1) and (1,0) sit between x = 1 (100) and a horizontal side (0).
        let corner = m.vertices().iter().position(|v| *v == [1.0, 1.0]).unwrap();
        assert_eq!(d.values[corner], Some(50.0));
        let mid = m.vertices().iter().position(|v| *v == [1.0, 0.5]).unwrap();
        assert_eq!(d.values[mid], Some(100.0));
        assert_eq!(d.corner_conflicts.len(), 2);
    }

    #[test]
    fn continuous_data_interpolated_pointwise() {
        let m = unit(2);
        let mut p = ProblemSpec::new(1.0);
        p.dirichlet = Arc::new(|x| 1.0 + x[0] + 2.0 * x[1]);
        let d = dirichlet_values(&m, &p);
        assert!(d.corner_conflicts.is_empty());
        for (v, val) in d.values.iter().enumerate() {
            if let Some(val) = val {
                let x = m.vertex(v);
                assert_eq!(*val, 1.0 + x[0] + 2.0 * x[1]);
            }
        }
    }

    #[test]
    fn affine_solution_reproduced() {
        // u = 1 + x + 2y solves -εΔu + a·∇u + bu = f with affine f; SUPG is
        // consistent for it, so the discrete solution is exact at the nodes.
        let m = unit(3);
        let (a, b) = ([1.0, 0.5], 1.0);
        let mut p = ProblemSpec::new(0.01)
            .with_constant_coefficients(a, b, 1.0, 1.0)
            .with_source(move |x| a[0] + 2.0 * a[1] + b * (1.0 + x[0] + 2.0 * x[1]), true);
        p.dirichlet = Arc::new(|x| 1.0 + x[0] + 2.0 * x[1]);
        let u = solve(&m, &p, DeltaRule::new(2.0)).unwrap();
        for (v, val) in u.values().iter().enumerate() {
            let x = m.vertex(v);
            assert!((val - (1.0 + x[0] + 2.0 * x[1])).abs() < 1e-9);
        }
    }

    #[test]
    fn neumann_load_integrates_flux() {
        // u = x on the unit square, ε = 1, Neumann on x = 1 with g = ε ∂u/∂n = 1.
        let m = Mesh::square([0.0, 0.0], [1.0, 1.0], 4, |x| {
            if x[0] > 1.0 - 1e-12 {
                BoundaryTag::Neumann
            } else {
                BoundaryTag::Dirichlet
            }
        })
        .unwrap();
        let mut p = ProblemSpec::new(1.0);
        p.dirichlet = Arc::new(|x| x[0]);
        p.neumann = Arc::new(|_, n| n[0]);
        let u = solve(&m, &p, DeltaRule::galerkin()).unwrap();
        for (v, val) in u.values().iter().enumerate() {
            assert!((val - m.vertex(v)[0]).abs() < 1e-9);
        }
    }
}
