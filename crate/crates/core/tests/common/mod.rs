//! Independent dense oracles and mesh fixtures shared by the integration tests.
//!
//! Geometry, element integrals and linear solves here are written from
//! scratch and only borrow quadrature points and mesh connectivity from the
//! library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supg_recovery::fem::{DeltaRule, P1Function, ProblemSpec};
use supg_recovery::linalg::quad_triangle;
use supg_recovery::mesh::{BoundaryTag, Mesh, Point};
use supg_recovery::recovery::FluxSpace;

/// Gaussian elimination with partial pivoting on a dense system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        let pivot_row = a[k].clone();
        assert!(pivot_row[k].abs() > 1e-300, "singular oracle system");
        for i in k + 1..n {
            let f = a[i][k] / pivot_row[k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * pivot_row[j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Hand-computed geometry of one triangle.
pub struct Geometry {
    pub p: [Point; 3],
    pub area: f64,
    pub h: f64,
    pub centroid: Point,
    pub grads: [[f64; 2]; 3],
    /// `∫_K (x − x_c)(x − x_c)ᵀ`.
    pub second_moment: [[f64; 2]; 2],
}

pub fn geometry(mesh: &Mesh, t: usize) -> Geometry {
    let p = mesh.triangle(t).map(|v| mesh.vertex(v));
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let grads = std::array::from_fn(|i| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det]
    });
    let dist = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
    let h = dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]));
    let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
    let area = 0.5 * det.abs();
    let mut second_moment = [[0.0; 2]; 2];
    for v in p {
        let d = [v[0] - centroid[0], v[1] - centroid[1]];
        for i in 0..2 {
            for j in 0..2 {
                second_moment[i][j] += area / 12.0 * d[i] * d[j];
            }
        }
    }
    Geometry { p, area, h, centroid, grads, second_moment }
}

impl Geometry {
    pub fn map(&self, bary: [f64; 3]) -> Point {
        let x = bary[0] * self.p[0][0] + bary[1] * self.p[1][0] + bary[2] * self.p[2][0];
        let y = bary[0] * self.p[0][1] + bary[1] * self.p[1][1] + bary[2] * self.p[2][1];
        [x, y]
    }
}

pub fn gradient(mesh: &Mesh, values: &[f64], t: usize) -> [f64; 2] {
    let g = geometry(mesh, t);
    let tri = mesh.triangle(t);
    let mut out = [0.0; 2];
    for k in 0..3 {
        out[0] += values[tri[k]] * g.grads[k][0];
        out[1] += values[tri[k]] * g.grads[k][1];
    }
    out
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Nodal SUPG solution for constant `a`, `b` and a pure Dirichlet boundary,
/// with element matrices integrated by hand.
pub fn supg_oracle(mesh: &Mesh, prob: &ProblemSpec, delta: DeltaRule) -> Vec<f64> {
    let eps = prob.epsilon;
    let a = (prob.velocity)([0.5, 0.5]);
    let b = (prob.reaction)([0.5, 0.5]);
    let rule = quad_triangle(prob.assembly_degree()).unwrap();
    let mut fixed = vec![None; mesh.n_vertices()];
    for edge in mesh.edges() {
        if edge.minus.is_none() {
            assert_eq!(edge.tag, Some(BoundaryTag::Dirichlet));
            for v in edge.vertices {
                fixed[v] = Some((prob.dirichlet)(mesh.vertex(v)));
            }
        }
    }
    let mut index = vec![usize::MAX; mesh.n_vertices()];
    let mut n = 0;
    for v in 0..mesh.n_vertices() {
        if fixed[v].is_none() {
            index[v] = n;
            n += 1;
        }
    }
    let mut mat = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for t in 0..mesh.n_triangles() {
        let g = geometry(mesh, t);
        let d = delta.c_delta * g.h;
        let adv: [f64; 3] = std::array::from_fn(|i| dot(a, g.grads[i]));
        let tri = mesh.triangle(t);
        let mut load = [0.0; 3];
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let f = (prob.source)(g.map(*bary));
            for i in 0..3 {
                load[i] += 2.0 * g.area * w * f * (bary[i] + d * adv[i]);
            }
        }
        for i in 0..3 {
            if fixed[tri[i]].is_some() {
                continue;
            }
            let row = index[tri[i]];
            rhs[row] += load[i];
            for j in 0..3 {
                let mass = g.area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let k = eps * g.area * dot(g.grads[i], g.grads[j])
                    + g.area / 3.0 * adv[j]
                    + b * mass
                    + d * (g.area * adv[i] * adv[j] + b * g.area / 3.0 * adv[i]);
                match fixed[tri[j]] {
                    Some(u) => rhs[row] -= k * u,
                    None => mat[row][index[tri[j]]] += k,
                }
            }
        }
    }
    let x = gauss_solve(mat, rhs);
    (0..mesh.n_vertices()).map(|v| fixed[v].unwrap_or_else(|| x[index[v]])).collect()
}

/// Per-element affine field `c + M(x − x_c)` about the centroid.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub c: [f64; 2],
    pub m: [[f64; 2]; 2],
    pub xc: Point,
}

impl Affine {
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

    /// `∫_K |c + M d|²` from the second moment of `K`.
    pub fn norm_sq(&self, g: &Geometry) -> f64 {
        let mut s = g.area * dot(self.c, self.c);
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    s += self.m[i][a] * self.m[i][b] * g.second_moment[a][b];
                }
            }
        }
        s
    }
}

/// Local parameter fields: RT0 is `c + b(x − x_c)`, BDM1 is a full affine field.
fn local_shapes(space: FluxSpace) -> Vec<([f64; 2], [[f64; 2]; 2])> {
    match space {
        FluxSpace::Rt0 => vec![([1.0, 0.0], [[0.0; 2]; 2]), ([0.0, 1.0], [[0.0; 2]; 2]), ([0.0; 2], [[1.0, 0.0], [0.0, 1.0]])],
        FluxSpace::Bdm1 => {
            let mut v = vec![([1.0, 0.0], [[0.0; 2]; 2]), ([0.0, 1.0], [[0.0; 2]; 2])];
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let mut m = [[0.0; 2]; 2];
                m[i][j] = 1.0;
                v.push(([0.0; 2], m));
            }
            v
        }
    }
}

/// Independent weight `γ_K` for constant data.
pub fn gamma_oracle(h: f64, a_norm: f64, eps: f64, beta: f64, scale: f64) -> f64 {
    let mut alpha = (h / eps.sqrt()).min(h.sqrt());
    if beta > 0.0 {
        alpha = alpha.min(1.0 / beta.sqrt());
    }
    let mut m = alpha / (8.0 * eps.sqrt());
    if a_norm > 0.0 {
        m = m.min(1.0 / a_norm);
    }
    if beta > 0.0 {
        m = m.min(1.0 / (beta * eps).sqrt());
    }
    scale * h * m
}

/// Minimizer of `½‖σ + ε∇u_h‖² + ½ Σ_K εγ_K |K| (∇·σ − R̄_K)²` over
/// discontinuous local fields subject to normal continuity on interior
/// edges, solved as one dense KKT system. `gamma_scale = None` drops the
/// divergence term (the plain L² projection).
pub fn projection_oracle(u_h: &P1Function, prob: &ProblemSpec, space: FluxSpace, gamma_scale: Option<f64>) -> Vec<Affine> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    let shapes = local_shapes(space);
    let nl = shapes.len();
    let nt = mesh.n_triangles();
    let interior: Vec<usize> = (0..mesh.n_edges()).filter(|&e| mesh.edge(e).minus.is_some()).collect();
    let params: &[f64] = match space {
        FluxSpace::Rt0 => &[0.5],
        FluxSpace::Bdm1 => &[0.2, 0.8],
    };
    let n_primal = nl * nt;
    let n = n_primal + params.len() * interior.len();
    let mut kkt = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    let rule = quad_triangle(prob.residual_degree()).unwrap();
    for t in 0..nt {
        let g = geometry(mesh, t);
        let grad = gradient(mesh, u_h.values(), t);
        let fields: Vec<Affine> = shapes.iter().map(|(c, m)| Affine { c: *c, m: *m, xc: g.centroid }).collect();
        let gamma = gamma_scale.map(|s| {
            let a = (prob.velocity)(g.centroid);
            gamma_oracle(g.h, a[0].hypot(a[1]), eps, prob.beta, s)
        });
        let mut r_int = 0.0;
        if gamma.is_some() {
            let tri = mesh.triangle(t);
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let x = g.map(*bary);
                let a = (prob.velocity)(x);
                let u: f64 = (0..3).map(|k| bary[k] * u_h.values()[tri[k]]).sum();
                r_int += 2.0 * g.area * w * ((prob.source)(x) - dot(a, grad) - (prob.reaction)(x) * u);
            }
        }
        for k in 0..nl {
            let row = t * nl + k;
            rhs[row] = -eps * g.area * dot(grad, fields[k].c);
            if let Some(gm) = gamma {
                rhs[row] += eps * gm * r_int * fields[k].divergence();
            }
            for l in 0..nl {
                let mut s = g.area * dot(fields[k].c, fields[l].c);
                for i in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            s += fields[k].m[i][a] * fields[l].m[i][b] * g.second_moment[a][b];
                        }
                    }
                }
                if let Some(gm) = gamma {
                    s += eps * gm * g.area * fields[k].divergence() * fields[l].divergence();
                }
                kkt[row][t * nl + l] = s;
            }
        }
    }
    let mut row = n_primal;
    for &e in &interior {
        let edge = mesh.edge(e);
        let [pa, pb] = edge.vertices.map(|v| mesh.vertex(v));
        let normal = [pb[1] - pa[1], pa[0] - pb[0]];
        for &s in params {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            for (t, sign) in [(edge.plus, 1.0), (edge.minus.unwrap(), -1.0)] {
                let xc = geometry(mesh, t).centroid;
                for (k, (c, m)) in shapes.iter().enumerate() {
                    let v = Affine { c: *c, m: *m, xc }.eval(x);
                    kkt[row][t * nl + k] = sign * dot(v, normal);
                    kkt[t * nl + k][row] = sign * dot(v, normal);
                }
            }
            row += 1;
        }
    }
    let x = gauss_solve(kkt, rhs);
    (0..nt)
        .map(|t| {
            let xc = geometry(mesh, t).centroid;
            let mut f = Affine { c: [0.0; 2], m: [[0.0; 2]; 2], xc };
            for (k, (c, m)) in shapes.iter().enumerate() {
                let p = x[t * nl + k];
                for i in 0..2 {
                    f.c[i] += p * c[i];
                    for j in 0..2 {
                        f.m[i][j] += p * m[i][j];
                    }
                }
            }
            f
        })
        .collect()
}

/// Outward unit normal of triangle `t` on edge `e`.
pub fn outward_normal(mesh: &Mesh, t: usize, e: usize) -> [f64; 2] {
    let [pa, pb] = mesh.edge(e).vertices.map(|v| mesh.vertex(v));
    let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
    let mut n = [(pb[1] - pa[1]) / len, (pa[0] - pb[0]) / len];
    let c = geometry(mesh, t).centroid;
    if dot(n, [pa[0] - c[0], pa[1] - c[1]]) < 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

/// Explicit edge fluxes: `γ_e τ_+·n + (1 − γ_e) τ_−·n` with
/// `1 − γ_e = α_e √(ε/h_e)` and `τ = −ε∇u_h`, normal outward from `K+`.
pub fn explicit_oracle(u_h: &P1Function, prob: &ProblemSpec) -> Vec<f64> {
    let mesh = u_h.mesh();
    let eps = prob.epsilon;
    (0..mesh.n_edges())
        .map(|e| {
            let edge = mesh.edge(e);
            let n = outward_normal(mesh, edge.plus, e);
            let tau = |t: usize| -eps * dot(gradient(mesh, u_h.values(), t), n);
            match edge.minus {
                None => tau(edge.plus),
                Some(m) => {
                    let [pa, pb] = edge.vertices.map(|v| mesh.vertex(v));
                    let h = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                    let mut alpha = (h / eps).sqrt().min(1.0);
                    if prob.beta > 0.0 {
                        alpha = alpha.min((eps * prob.beta).powf(-0.25));
                    }
                    let w = alpha * (eps / h).sqrt();
                    (1.0 - w) * tau(edge.plus) + w * tau(m)
                }
            }
        })
        .collect()
}

/// Largest pointwise difference at the vertices between two per-element
/// field families, and the largest magnitude of the first.
pub fn field_difference(mesh: &Mesh, a: &[Affine], b: impl Fn(usize, Point) -> [f64; 2]) -> (f64, f64) {
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for t in 0..mesh.n_triangles() {
        for v in mesh.triangle(t) {
            let x = mesh.vertex(v);
            let (p, q) = (a[t].eval(x), b(t, x));
            diff = diff.max((p[0] - q[0]).abs()).max((p[1] - q[1]).abs());
            scale = scale.max(p[0].abs()).max(p[1].abs());
        }
    }
    (diff, scale)
}

/// A family of small meshes: uniform squares and seeded random local refinements.
pub fn small_meshes(lo: Point, hi: Point, max_unknowns: usize) -> Vec<Mesh> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2, 3, 4] {
        let base = Mesh::square(lo, hi, n, |_| BoundaryTag::Dirichlet).unwrap();
        out.push(base.clone());
        let mut m = base;
        for _ in 0..4 {
            let k = (m.n_triangles() / 5).max(1);
            let marked: Vec<usize> = (0..k).map(|_| rng.gen_range(0..m.n_triangles())).collect();
            let next = m.refine(&marked).unwrap();
            if next.n_edges() > max_unknowns {
                break;
            }
            m = next;
            out.push(m.clone());
        }
    }
    out.retain(|m| m.n_edges() <= max_unknowns);
    out
}

/// Random nodal values in `[-1, 1]`.
pub fn random_values(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
