use crate::error::{Error, Result};

/// Rule on the reference triangle `{(ξ, η): ξ, η ≥ 0, ξ + η ≤ 1}`. Points are
/// barycentric `(1 − ξ − η, ξ, η)`; weights sum to the reference area `1/2`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss–Legendre rule on `[0, 1]`; weights sum to one.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

pub fn quad_edge(degree: usize) -> Result<EdgeRule> {
    if degree == 0 || degree > 21 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(EdgeRule {
        points: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
        degree,
    })
}

/// Rule exact for all polynomials of total degree `degree` (1 to 7).
///
/// Degree 1 is the centroid rule and degree 2 the three-point interior rule.
/// Higher degrees use a collapsed Gauss–Legendre product rule, whose points
/// are interior and whose weights are positive.
pub fn quad_triangle(degree: usize) -> Result<TriangleRule> {
    match degree {
        1 => Ok(TriangleRule { points: vec![[1.0 / 3.0; 3]], weights: vec![0.5], degree }),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            Ok(TriangleRule { points: vec![[a, b, b], [b, a, b], [b, b, a]], weights: vec![1.0 / 6.0; 3], degree })
        }
        3..=7 => {
            // Integrand of degree d picks up one more degree in s from the
            // Jacobian (1 - s); n Gauss points integrate degree 2n - 1.
            let n = (degree + 2).div_ceil(2);
            let (x, w) = gauss_legendre(n);
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (si, ws) in x.iter().zip(&w) {
                let s = 0.5 * (si + 1.0);
                for (ti, wt) in x.iter().zip(&w) {
                    let t = 0.5 * (ti + 1.0);
                    let (xi, eta) = (s, t * (1.0 - s));
                    points.push([1.0 - xi - eta, xi, eta]);
                    weights.push(0.25 * ws * wt * (1.0 - s));
                }
            }
            Ok(TriangleRule { points, weights, degree })
        }
        _ => Err(Error::UnsupportedDegree(degree)),
    }
}
