use thiserror::Error;

use super::{dot, norm2, CsrMatrix};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("matrix is singular: row {row} is zero")]
    ZeroRow { row: usize },
    #[error("zero or negative pivot {value:e} in row {row}")]
    BadPivot { row: usize, value: f64 },
    #[error("dimension mismatch: matrix {rows}x{cols}, right-hand side {rhs}")]
    Dimension { rows: usize, cols: usize, rhs: usize },
}

fn check(a: &CsrMatrix, rhs: &[f64]) -> Result<(), SolverError> {
    if a.nrows() != a.ncols() || a.nrows() != rhs.len() {
        return Err(SolverError::Dimension { rows: a.nrows(), cols: a.ncols(), rhs: rhs.len() });
    }
    for i in 0..a.nrows() {
        if a.row(i).all(|(_, v)| v == 0.0) {
            return Err(SolverError::ZeroRow { row: i });
        }
    }
    Ok(())
}

fn residual(a: &CsrMatrix, x: &[f64], rhs: &[f64], r: &mut [f64]) {
    a.mul_vec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
}

/// Jacobi-preconditioned conjugate gradients. On success
/// `‖A x − rhs‖₂ ≤ rel_tol · ‖rhs‖₂`.
pub fn solve_spd(a: &CsrMatrix, rhs: &[f64], rel_tol: f64) -> Result<Vec<f64>, SolverError> {
    check(a, rhs)?;
    let n = rhs.len();
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .enumerate()
        .map(|(i, &d)| if d > 0.0 { Ok(1.0 / d) } else { Err(SolverError::BadPivot { row: i, value: d }) })
        .collect::<Result<_, _>>()?;

    let max_iter = (20 * n).max(2000);
    let target = rel_tol * bnorm;
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolverError::BadPivot { row: it, value: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // Periodically replace the recursive residual to stop drift.
        if it % 50 == 0 {
            residual(a, &x, rhs, &mut r);
        }
        if norm2(&r) <= target {
            residual(a, &x, rhs, &mut r);
            if norm2(&r) <= target {
                return Ok(x);
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    residual(a, &x, rhs, &mut r);
    Err(SolverError::NotConverged { iterations: max_iter, residual: norm2(&r) / bnorm })
}

/// Incomplete LU factorization with the sparsity pattern of `A`.
struct Ilu0 {
    lu: Vec<f64>,
    diag: Vec<usize>,
    a: CsrMatrix,
}

impl Ilu0 {
    fn new(a: &CsrMatrix) -> Result<Self, SolverError> {
        let n = a.nrows();
        let (rp, ci) = (a.row_ptr(), a.col_idx());
        let mut lu = a.values().to_vec();
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in rp[i]..rp[i + 1] {
                if ci[k] == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(SolverError::BadPivot { row: i, value: 0.0 });
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            for k in rp[i]..rp[i + 1] {
                pos[ci[k]] = k;
            }
            for kk in rp[i]..diag[i] {
                let k = ci[kk];
                let pivot = lu[diag[k]];
                if pivot == 0.0 {
                    return Err(SolverError::BadPivot { row: k, value: pivot });
                }
                lu[kk] /= pivot;
                let factor = lu[kk];
                for jj in diag[k] + 1..rp[k + 1] {
                    let p = pos[ci[jj]];
                    if p != usize::MAX {
                        lu[p] -= factor * lu[jj];
                    }
                }
            }
            for k in rp[i]..rp[i + 1] {
                pos[ci[k]] = usize::MAX;
            }
            if lu[diag[i]] == 0.0 || !lu[diag[i]].is_finite() {
                return Err(SolverError::BadPivot { row: i, value: lu[diag[i]] });
            }
        }
        Ok(Self { lu, diag, a: a.clone() })
    }

    fn apply(&self, b: &[f64], x: &mut [f64]) {
        let (rp, ci) = (self.a.row_ptr(), self.a.col_idx());
        let n = b.len();
        for i in 0..n {
            let mut s = b[i];
            for k in rp[i]..self.diag[i] {
                s -= self.lu[k] * x[ci[k]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in self.diag[i] + 1..rp[i + 1] {
                s -= self.lu[k] * x[ci[k]];
            }
            x[i] = s / self.lu[self.diag[i]];
        }
    }
}

const RESTART: usize = 60;

/// Restarted GMRES, right-preconditioned with ILU(0). On success
/// `‖A x − rhs‖₂ ≤ rel_tol · ‖rhs‖₂`, checked on the true residual.
pub fn solve_general(a: &CsrMatrix, rhs: &[f64], rel_tol: f64) -> Result<Vec<f64>, SolverError> {
    check(a, rhs)?;
    let n = rhs.len();
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let ilu = Ilu0::new(a)?;
    let target = rel_tol * bnorm;
    let max_iter = (10 * n).max(3000);

    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut w = vec![0.0; n];
    let mut total = 0;
    loop {
        let beta = norm2(&r);
        if beta <= target {
            return Ok(x);
        }
        if total >= max_iter {
            return Err(SolverError::NotConverged { iterations: total, residual: beta / bnorm });
        }
        let m = RESTART.min(n);
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut k = 0;
        while k < m && total < max_iter {
            let mut zk = vec![0.0; n];
            ilu.apply(&v[k], &mut zk);
            a.mul_vec_into(&zk, &mut w);
            z.push(zk);
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(&w, vi);
                h[i][k] = hik;
                for (wj, vij) in w.iter_mut().zip(vi) {
                    *wj -= hik * vij;
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = cs[k] * h[k][k] + sn[k] * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            if g[k].abs() <= 0.5 * target || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            if h[i][i] == 0.0 {
                return Err(SolverError::NotConverged { iterations: total, residual: beta / bnorm });
            }
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            for (xj, zij) in x.iter_mut().zip(zi) {
                *xj += yi * zij;
            }
        }
        residual(a, &x, rhs, &mut r);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NotConverged { iterations: total, residual: f64::INFINITY });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let a = CsrMatrix::identity(4);
        let b = vec![1.0, -2.0, 3.0, 0.5];
        assert_eq!(solve_spd(&a, &b, 1e-12).unwrap(), b);
        let x = solve_general(&a, &b, 1e-12).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = solve_spd(&a, &[3.0, 3.0], 1e-14).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn upper_triangular() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0, -1.0], vec![0.0, 3.0, 2.0], vec![0.0, 0.0, 4.0]]);
        let b = [1.0, 2.0, 8.0];
        // back substitution
        let x2 = 8.0 / 4.0;
        let x1 = (2.0 - 2.0 * x2) / 3.0;
        let x0 = (1.0 - x1 + x2) / 2.0;
        let x = solve_general(&a, &b, 1e-14).unwrap();
        assert!((x[0] - x0).abs() < 1e-13 && (x[1] - x1).abs() < 1e-13 && (x[2] - x2).abs() < 1e-13);
    }

    #[test]
    fn zero_row_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(solve_general(&a, &[1.0, 1.0], 1e-10), Err(SolverError::ZeroRow { row: 1 }));
        assert_eq!(solve_spd(&a, &[1.0, 1.0], 1e-10), Err(SolverError::ZeroRow { row: 1 }));
    }

    #[test]
    fn zero_rhs() {
        let a = CsrMatrix::identity(3);
        assert_eq!(solve_general(&a, &[0.0; 3], 1e-10).unwrap(), vec![0.0; 3]);
    }
}
