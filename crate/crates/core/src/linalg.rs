//! Dense complex linear algebra: equilibrated LU solve with a condition
//! estimate, matrix-vector products and restarted GMRES.

use crate::error::{Error, Result};
use crate::numerics::{norm2_c, pairwise_sum_c, C64};
use faer::linalg::solvers::{PartialPivLu, Solve};

pub type Matrix = faer::Mat<C64>;

/// Result of a linear solve.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<C64>,
    /// `||A x - b|| / ||b||` (0 when `b = 0`).
    pub residual: f64,
    /// Estimate of the 1-norm condition number of the row-equilibrated
    /// matrix; NaN when not computed.
    pub condition: f64,
}

pub fn matvec(a: &Matrix, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    crate::parallel::map_indices(a.nrows(), |i| {
        let row: Vec<C64> = (0..a.ncols()).map(|j| a[(i, j)] * x[j]).collect();
        pairwise_sum_c(&row)
    })
}

pub fn relative_residual(a: &Matrix, x: &[C64], b: &[C64]) -> f64 {
    let bn = norm2_c(b);
    let ax = matvec(a, x);
    let r: Vec<C64> = ax.iter().zip(b).map(|(u, v)| u - v).collect();
    if bn == 0.0 {
        norm2_c(&r)
    } else {
        norm2_c(&r) / bn
    }
}

fn col(v: &[C64]) -> faer::Mat<C64> {
    faer::Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn to_vec(m: &faer::Mat<C64>) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

fn one_norm(a: &Matrix) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager-Higham estimate of `||A^{-1}||_1` from an LU factorization.
fn inverse_one_norm_estimate(lu: &PartialPivLu<C64>, n: usize) -> f64 {
    let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = to_vec(&lu.solve(col(&x)));
        est = y.iter().map(|v| v.norm()).sum::<f64>();
        let xi: Vec<C64> = y
            .iter()
            .map(|v| {
                let m = v.norm();
                if m == 0.0 {
                    C64::new(1.0, 0.0)
                } else {
                    v / m
                }
            })
            .collect();
        let z = to_vec(&lu.solve_adjoint(col(&xi)));
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, -1.0), |acc, e| if e.1 > acc.1 { e } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = vec![C64::new(0.0, 0.0); n];
        x[j] = C64::new(1.0, 0.0);
    }
    // Higham's alternative test vector guards against unlucky cancellation.
    let alt: Vec<C64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            C64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
        })
        .collect();
    let y = to_vec(&lu.solve(col(&alt)));
    let alt_est = 2.0 * y.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
    est.max(alt_est)
}

/// LU solve with row equilibration, partial pivoting and up to two steps of
/// iterative refinement. Fails with a singular-system error when the
/// factorization produces non-finite values.
pub fn dense_solve(a: &Matrix, b: &[C64], module: &'static str) -> Result<DenseSolution> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::invalid(module, "dense_solve needs a square system"));
    }
    if n == 0 {
        return Ok(DenseSolution {
            x: vec![],
            residual: 0.0,
            condition: 1.0,
        });
    }
    let scale: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].norm()).fold(0.0, f64::max))
        .collect();
    if let Some(i) = scale.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::singular(
            module,
            f64::INFINITY,
            format!("row {i} is zero or non-finite"),
        ));
    }
    // the scaled copy is dropped once factored to keep peak memory at two matrices
    let (lu, scaled_norm) = {
        let scaled = Matrix::from_fn(n, n, |i, j| a[(i, j)] / scale[i]);
        (scaled.partial_piv_lu(), one_norm(&scaled))
    };
    let condition = scaled_norm * inverse_one_norm_estimate(&lu, n);
    let sb: Vec<C64> = b.iter().zip(&scale).map(|(v, s)| v / s).collect();
    if sb.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(DenseSolution {
            x: vec![C64::new(0.0, 0.0); n],
            residual: 0.0,
            condition,
        });
    }
    let mut x = to_vec(&lu.solve(col(&sb)));
    let mut residual = relative_residual(a, &x, b);
    for _ in 0..2 {
        if !(residual > 1e-14) {
            break;
        }
        let ax = matvec(a, &x);
        let r: Vec<C64> = (0..n).map(|i| (b[i] - ax[i]) / scale[i]).collect();
        let dx = to_vec(&lu.solve(col(&r)));
        let cand: Vec<C64> = x.iter().zip(&dx).map(|(u, v)| u + v).collect();
        let cres = relative_residual(a, &cand, b);
        if cres < residual {
            x = cand;
            residual = cres;
        } else {
            break;
        }
    }
    if !condition.is_finite() || condition > 1e16 || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::singular(module, condition, "pivot collapse in LU factorization"));
    }
    Ok(DenseSolution {
        x,
        residual,
        condition,
    })
}

/// Restarted GMRES without preconditioning. Returns the iterate and its
/// relative residual; fails when `tol` is not reached within `max_iter`
/// matrix-vector products.
pub fn gmres<F>(apply: F, b: &[C64], tol: f64, max_iter: usize, restart: usize, module: &'static str) -> Result<DenseSolution>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let bn = norm2_c(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bn == 0.0 {
        return Ok(DenseSolution {
            x,
            residual: 0.0,
            condition: f64::NAN,
        });
    }
    let mut iters = 0;
    let mut res = 1.0;
    while iters < max_iter {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
        let beta = norm2_c(&r);
        res = beta / bn;
        if res <= tol {
            break;
        }
        let m = restart.min(max_iter - iters);
        let mut v: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            let mut w = apply(&v[k]);
            iters += 1;
            for (i, vi) in v.iter().enumerate() {
                let hik: C64 = pairwise_sum_c(&vi.iter().zip(&w).map(|(a, b)| a.conj() * b).collect::<Vec<_>>());
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hik * vj;
                }
            }
            let wn = norm2_c(&w);
            h[k + 1][k] = C64::new(wn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (a, bb) = (h[k][k], h[k + 1][k]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if den == 0.0 {
                cs[k] = C64::new(1.0, 0.0);
                sn[k] = C64::new(0.0, 0.0);
            } else {
                cs[k] = a / den;
                sn[k] = bb / den;
            }
            h[k][k] = cs[k].conj() * a + sn[k].conj() * bb;
            h[k + 1][k] = C64::new(0.0, 0.0);
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            if g[k + 1].norm() / bn <= tol || wn == 0.0 || iters >= max_iter {
                break;
            }
            v.push(w.iter().map(|z| z / wn).collect());
        }
        let mut y = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vji) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vji;
            }
        }
    }
    let ax = apply(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let final_res = norm2_c(&r) / bn;
    if final_res > tol {
        return Err(Error::singular(
            module,
            f64::NAN,
            format!("GMRES stalled at relative residual {final_res:.3e} after {iters} iterations (last restart {res:.3e})"),
        ));
    }
    Ok(DenseSolution {
        x,
        residual: final_res,
        condition: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| {
            let d = if i == j { 4.0 } else { 0.0 };
            C64::new(d + ((i * 7 + j * 3) % 5) as f64 * 0.1, ((i + 2 * j) % 3) as f64 * 0.05)
        })
    }

    #[test]
    fn lu_solves_and_reports_condition() {
        let a = test_matrix(30);
        let xt: Vec<C64> = (0..30).map(|i| C64::new(i as f64, -1.0)).collect();
        let b = matvec(&a, &xt);
        let s = dense_solve(&a, &b, "test").unwrap();
        assert!(s.residual < 1e-13);
        assert!(s.condition >= 1.0 && s.condition < 100.0);
        for (u, v) in s.x.iter().zip(&xt) {
            assert!((u - v).norm() < 1e-11);
        }
    }

    #[test]
    fn condition_estimate_is_close_to_exact() {
        let a = Matrix::from_fn(3, 3, |i, j| C64::new(if i == j { [1.0, 1e-3, 2.0][i] } else { 0.0 }, 0.0));
        let s = dense_solve(&a, &[C64::new(1.0, 0.0); 3], "test").unwrap();
        // after row equilibration the matrix is the identity
        assert!((s.condition - 1.0).abs() < 1e-12);
        let b = Matrix::from_fn(2, 2, |i, j| C64::new([[1.0, 1.0], [1.0, 1.0 + 1e-8]][i][j], 0.0));
        let s = dense_solve(&b, &[C64::new(1.0, 0.0); 2], "test").unwrap();
        assert!(s.condition > 1e7);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Matrix::from_fn(3, 3, |i, _| C64::new(i as f64 + 1.0, 0.0));
        let e = dense_solve(&a, &[C64::new(1.0, 0.0); 3], "foldy_lax").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().starts_with("foldy_lax"));
    }

    #[test]
    fn gmres_agrees_with_lu() {
        let a = test_matrix(60);
        let b: Vec<C64> = (0..60).map(|i| C64::new(1.0, i as f64 * 0.01)).collect();
        let g = gmres(|x| matvec(&a, x), &b, 1e-12, 500, 20, "test").unwrap();
        let d = dense_solve(&a, &b, "test").unwrap();
        for (u, v) in g.x.iter().zip(&d.x) {
            assert!((u - v).norm() < 1e-10);
        }
    }
}
