//! H(div)-conforming recovery of the diffusive flux `σ = −ε∇u` from a
//! discrete solution: explicit edge averaging in RT0, the weighted L²
//! projection onto RT0 or BDM1, and the stabilized H(div) projection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{alpha_e, alpha_k};
use crate::fem::{P1Function, ProblemSpec};
use crate::linalg::{quad_triangle, solve_dense, solve_spd, CooMatrix, RECOVERY_TOL};
use crate::mesh::{Mesh, Point};

/// Tolerance on barycentric coordinates for point-location checks.
const INSIDE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxSpace {
    Rt0,
    Bdm1,
}

impl FluxSpace {
    /// Degrees of freedom per edge.
    pub fn dofs_per_edge(self) -> usize {
        match self {
            FluxSpace::Rt0 => 1,
            FluxSpace::Bdm1 => 2,
        }
    }

    /// Edge parameters (from the lower- to the higher-numbered vertex) at
    /// which the normal-component functionals are taken.
    pub fn edge_params(self) -> &'static [f64] {
        const MID: [f64; 1] = [0.5];
        // Two-point Gauss–Legendre on [0, 1].
        const GL2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];
        match self {
            FluxSpace::Rt0 => &MID,
            FluxSpace::Bdm1 => &GL2,
        }
    }
}

/// Vector field `c + M (x − x_c)` on one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub c: [f64; 2],
    pub m: [[f64; 2]; 2],
    pub xc: Point,
}

impl AffineField {
    pub fn constant(c: [f64; 2], xc: Point) -> Self {
        Self { c, m: [[0.0; 2]; 2], xc }
    }

    pub fn zero(xc: Point) -> Self {
        Self::constant([0.0; 2], xc)
    }

    pub fn eval(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.xc[0], x[1] - self.xc[1]];
        [
            self.c[0] + self.m[0][0] * d[0] + self.m[0][1] * d[1],
            self.c[1] + self.m[1][0] * d[0] + self.m[1][1] * d[1],
        ]
    }

    pub fn divergence(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    fn axpy(&mut self, s: f64, other: &AffineField) {
        for i in 0..2 {
            self.c[i] += s * other.c[i];
            for j in 0..2 {
                self.m[i][j] += s * other.m[i][j];
            }
        }
    }
}

/// Nodal basis of the flux space on one triangle, with the global dof
/// index of each local function.
#[derive(Debug, Clone)]
pub struct LocalBasis {
    pub fields: Vec<AffineField>,
    pub dofs: Vec<usize>,
}

/// Local basis on triangle `t`: function `i` has normal component `n_e`
/// (global orientation) equal to 1 at its own edge functional and 0 at the
/// others.
pub fn local_basis(mesh: &Mesh, t: usize, space: FluxSpace) -> LocalBasis {
    let xc = mesh.centroid(t);
    let h = mesh.diameter(t);
    let monomials: Vec<AffineField> = match space {
        FluxSpace::Rt0 => vec![
            AffineField::constant([1.0, 0.0], xc),
            AffineField::constant([0.0, 1.0], xc),
            AffineField { c: [0.0; 2], m: [[1.0 / h, 0.0], [0.0, 1.0 / h]], xc },
        ],
        FluxSpace::Bdm1 => {
            let mut v = vec![AffineField::constant([1.0, 0.0], xc), AffineField::constant([0.0, 1.0], xc)];
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let mut m = [[0.0; 2]; 2];
                m[i][j] = 1.0 / h;
                v.push(AffineField { c: [0.0; 2], m, xc });
            }
            v
        }
    };
    let nd = space.dofs_per_edge();
    let mut functionals: Vec<(Point, [f64; 2])> = Vec::with_capacity(3 * nd);
    let mut dofs = Vec::with_capacity(3 * nd);
    for e in mesh.tri_edges(t) {
        let [a, b] = mesh.edge_points(e);
        let n = mesh.edge_normal(e);
        for (j, s) in space.edge_params().iter().enumerate() {
            functionals.push(([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])], n));
            dofs.push(e * nd + j);
        }
    }
    let f: Vec<Vec<f64>> = functionals
        .iter()
        .map(|(q, n)| {
            monomials
                .iter()
                .map(|m| {
                    let v = m.eval(*q);
                    v[0] * n[0] + v[1] * n[1]
                })
                .collect()
        })
        .collect();
    let fields = (0..monomials.len())
        .map(|i| {
            let mut rhs = vec![0.0; monomials.len()];
            rhs[i] = 1.0;
            let coef = solve_dense(f.clone(), rhs).expect("unisolvent edge functionals on a valid triangle");
            let mut phi = AffineField::zero(xc);
            for (c, m) in coef.iter().zip(&monomials) {
                phi.axpy(*c, m);
            }
            phi
        })
        .collect();
    LocalBasis { fields, dofs }
}

/// A recovered flux: global edge coefficients and the affine field they
/// induce on each triangle.
#[derive(Debug, Clone)]
pub struct FluxField<'m> {
    mesh: &'m Mesh,
    space: FluxSpace,
    coefficients: Vec<f64>,
    fields: Vec<AffineField>,
}

impl<'m> FluxField<'m> {
    /// Builds the field from edge coefficients, `dofs_per_edge` per edge.
    pub fn from_coefficients(mesh: &'m Mesh, space: FluxSpace, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.dofs_per_edge() * mesh.n_edges() {
            return Err(Error::InvalidArgument(format!(
                "{} flux coefficients for {} edges",
                coefficients.len(),
                mesh.n_edges()
            )));
        }
        let fields = (0..mesh.n_triangles())
            .map(|t| {
                let basis = local_basis(mesh, t, space);
                let mut f = AffineField::zero(mesh.centroid(t));
                for (phi, &d) in basis.fields.iter().zip(&basis.dofs) {
                    f.axpy(coefficients[d], phi);
                }
                f
            })
            .collect();
        Ok(Self { mesh, space, coefficients, fields })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn space(&self) -> FluxSpace {
        self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn element_field(&self, t: usize) -> &AffineField {
        &self.fields[t]
    }

    /// Value on triangle `t` at a point that must lie in `t`.
    pub fn eval(&self, t: usize, x: Point) -> Result<[f64; 2]> {
        let b = self.mesh.barycentric(t, x);
        if b.iter().any(|&l| l < -INSIDE_TOL) {
            return Err(Error::PointOutsideTriangle { triangle: t, x: x[0], y: x[1] });
        }
        Ok(self.fields[t].eval(x))
    }

    /// Divergence on triangle `t`; constant for both spaces.
    pub fn divergence(&self, t: usize) -> f64 {
        self.fields[t].divergence()
    }

    /// `σ|_t · n_e` at parameter `s ∈ [0, 1]` along edge `e` of `t`.
    pub fn normal_component(&self, t: usize, e: usize, s: f64) -> f64 {
        let [a, b] = self.mesh.edge_points(e);
        let v = self.fields[t].eval([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        let n = self.mesh.edge_normal(e);
        v[0] * n[0] + v[1] * n[1]
    }
}

/// `1 − γ_e = α_e (ε / h_e)^{1/2}`, the weight given to the `K−` side.
pub fn explicit_one_minus_gamma(h_e: f64, eps: f64, beta: f64) -> f64 {
    alpha_e(h_e, eps, beta) * (eps / h_e).sqrt()
}

/// Explicit local averaging of `τ = −ε∇u_h` in RT0. Interior edges take
/// `γ_e τ|_{K+}·n_e + (1 − γ_e) τ|_{K−}·n_e`; boundary edges take `τ|_{K+}·n_e`.
pub fn recover_explicit_rt0<'m>(u_h: &P1Function<'m>, prob: &ProblemSpec) -> Result<FluxField<'m>> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let tau = |t: usize, n: [f64; 2]| {
        let g = u_h.gradient(t);
        -eps * (g[0] * n[0] + g[1] * n[1])
    };
    let coefficients = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let n = mesh.edge_normal(e);
            let plus = tau(edge.plus, n);
            match edge.minus {
                None => plus,
                Some(m) => {
                    let w = explicit_one_minus_gamma(mesh.edge_length(e), eps, prob.beta);
                    (1.0 - w) * plus + w * tau(m, n)
                }
            }
        })
        .collect();
    FluxField::from_coefficients(mesh, FluxSpace::Rt0, coefficients)
}

/// `max |a|` over the vertices and assembly quadrature points of `t`.
pub fn velocity_max(mesh: &Mesh, prob: &ProblemSpec, t: usize) -> f64 {
    let rule = quad_triangle(4).expect("degree 4 rule");
    mesh.triangle_points(t)
        .into_iter()
        .chain(rule.points.iter().map(|b| mesh.map_point(t, *b)))
        .map(|x| {
            let a = (prob.velocity)(x);
            a[0].hypot(a[1])
        })
        .fold(0.0, f64::max)
}

/// Stabilization weight `γ_K = t·h_K·min{1/‖a‖_{L∞(K)}, 1/√(βε), α_K/(8C²√ε)}`
/// where terms with a zero denominator are left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRule {
    pub c_stab: f64,
    /// Multiplier `t`; 1 is the standard rule, 0 turns the stabilization off.
    pub scale: f64,
}

impl Default for GammaRule {
    fn default() -> Self {
        Self { c_stab: 1.0, scale: 1.0 }
    }
}

impl GammaRule {
    pub fn new(c_stab: f64) -> Self {
        Self { c_stab, scale: 1.0 }
    }

    pub fn scaled(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_stab > 0.0) || !self.c_stab.is_finite() {
            return Err(Error::InvalidArgument(format!("C_stab must be positive, got {}", self.c_stab)));
        }
        if !(self.scale >= 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma scale must be nonnegative, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn gamma(&self, h: f64, a_max: f64, eps: f64, beta: f64) -> f64 {
        let mut m = alpha_k(h, eps, beta) / (8.0 * self.c_stab * self.c_stab * eps.sqrt());
        if a_max > 0.0 {
            m = m.min(1.0 / a_max);
        }
        if beta > 0.0 {
            m = m.min(1.0 / (beta * eps).sqrt());
        }
        self.scale * h * m
    }

    pub fn gamma_k(&self, mesh: &Mesh, prob: &ProblemSpec, t: usize) -> f64 {
        self.gamma(mesh.diameter(t), velocity_max(mesh, prob, t), prob.epsilon, prob.beta)
    }
}

/// Weighted L² projection: `(ε^{−1}σ, τ) = −(∇u_h, τ)` for all `τ` in the space.
pub fn recover_l2<'m>(u_h: &P1Function<'m>, prob: &ProblemSpec, space: FluxSpace) -> Result<FluxField<'m>> {
    recover_projection(u_h, prob, space, None)
}

/// Stabilized H(div) projection:
/// `(ε^{−1}σ, τ) + Σ_K γ_K (∇·σ, ∇·τ)_K = −(∇u_h, τ) + Σ_K γ_K (f − a·∇u_h − b u_h, ∇·τ)_K`.
pub fn recover_hdiv_stab<'m>(
    u_h: &P1Function<'m>,
    prob: &ProblemSpec,
    gamma: GammaRule,
    space: FluxSpace,
) -> Result<FluxField<'m>> {
    gamma.validate()?;
    recover_projection(u_h, prob, space, Some(gamma))
}

fn recover_projection<'m>(
    u_h: &P1Function<'m>,
    prob: &ProblemSpec,
    space: FluxSpace,
    gamma: Option<GammaRule>,
) -> Result<FluxField<'m>> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let n = space.dofs_per_edge() * mesh.n_edges();
    let nl = 3 * space.dofs_per_edge();
    let mass_rule = quad_triangle(2)?;
    let res_rule = quad_triangle(prob.residual_degree())?;
    let mut coo = CooMatrix::with_capacity(n, n, nl * nl * mesh.n_triangles());
    let mut rhs = vec![0.0; n];
    // Both sides are multiplied by ε.
    for t in 0..mesh.n_triangles() {
        let basis = local_basis(mesh, t, space);
        let area = mesh.area(t);
        let grad = u_h.gradient(t);
        let mut local = vec![vec![0.0; nl]; nl];
        let mut load = vec![0.0; nl];
        for (bary, w) in mass_rule.points.iter().zip(&mass_rule.weights) {
            let x = mesh.map_point(t, *bary);
            let w = 2.0 * area * w;
            let vals: Vec<[f64; 2]> = basis.fields.iter().map(|f| f.eval(x)).collect();
            for i in 0..nl {
                load[i] -= w * eps * (grad[0] * vals[i][0] + grad[1] * vals[i][1]);
                for j in 0..nl {
                    local[i][j] += w * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
                }
            }
        }
        if let Some(rule) = gamma {
            let g = eps * rule.gamma_k(mesh, prob, t);
            if g > 0.0 {
                let divs: Vec<f64> = basis.fields.iter().map(AffineField::divergence).collect();
                let mut r_int = 0.0;
                for (bary, w) in res_rule.points.iter().zip(&res_rule.weights) {
                    let x = mesh.map_point(t, *bary);
                    r_int += 2.0 * area * w * cell_residual_at(u_h, prob, t, *bary, x);
                }
                for i in 0..nl {
                    load[i] += g * r_int * divs[i];
                    for j in 0..nl {
                        local[i][j] += g * area * divs[i] * divs[j];
                    }
                }
            }
        }
        for i in 0..nl {
            rhs[basis.dofs[i]] += load[i];
            for j in 0..nl {
                coo.push(basis.dofs[i], basis.dofs[j], local[i][j]);
            }
        }
    }
    let x = solve_spd(&coo.to_csr(), &rhs, RECOVERY_TOL)?;
    FluxField::from_coefficients(mesh, space, x)
}

/// `f − a·∇u_h − b u_h` at a point of triangle `t`.
pub(crate) fn cell_residual_at(u_h: &P1Function, prob: &ProblemSpec, t: usize, bary: [f64; 3], x: Point) -> f64 {
    let g = u_h.gradient(t);
    let a = (prob.velocity)(x);
    (prob.source)(x) - (a[0] * g[0] + a[1] * g[1]) - (prob.reaction)(x) * u_h.eval_bary(t, bary)
}

/// Which recovery drives the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecoveryKind {
    Explicit,
    L2Rt0,
    L2Bdm1,
    Hdiv,
    HdivBdm1,
}

impl RecoveryKind {
    pub const ALL: [RecoveryKind; 5] =
        [RecoveryKind::Explicit, RecoveryKind::L2Rt0, RecoveryKind::L2Bdm1, RecoveryKind::Hdiv, RecoveryKind::HdivBdm1];

    pub fn name(self) -> &'static str {
        match self {
            RecoveryKind::Explicit => "explicit",
            RecoveryKind::L2Rt0 => "l2-rt0",
            RecoveryKind::L2Bdm1 => "l2-bdm1",
            RecoveryKind::Hdiv => "hdiv",
            RecoveryKind::HdivBdm1 => "hdiv-bdm1",
        }
    }

    pub fn space(self) -> FluxSpace {
        match self {
            RecoveryKind::L2Bdm1 | RecoveryKind::HdivBdm1 => FluxSpace::Bdm1,
            _ => FluxSpace::Rt0,
        }
    }

    pub fn is_explicit(self) -> bool {
        self == RecoveryKind::Explicit
    }
}

impl fmt::Display for RecoveryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecoveryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecoveryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown recovery '{s}'")))
    }
}

pub fn recover<'m>(
    kind: RecoveryKind,
    u_h: &P1Function<'m>,
    prob: &ProblemSpec,
    gamma: GammaRule,
) -> Result<FluxField<'m>> {
    match kind {
        RecoveryKind::Explicit => recover_explicit_rt0(u_h, prob),
        RecoveryKind::L2Rt0 | RecoveryKind::L2Bdm1 => recover_l2(u_h, prob, kind.space()),
        RecoveryKind::Hdiv | RecoveryKind::HdivBdm1 => recover_hdiv_stab(u_h, prob, gamma, kind.space()),
    }
}
