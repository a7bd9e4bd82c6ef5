use super::LayerKind;
use crate::linalg::Matrix;
use crate::numerics::{gauss_legendre_interval, legendre_series, legendre_table, Vec3, C64};
use std::f64::consts::PI;

/// Eigenvalues `0..=lmax` of the layer operator `kind` on a sphere of radius
/// `r`, from the one-dimensional Funk-Hecke integrals over the polar angle.
/// `K` and `K*` share their spectrum on a sphere.
pub fn sphere_eigenvalues(kind: LayerKind, kappa: C64, r: f64, lmax: usize) -> Vec<C64> {
    let kr = (kappa * r).norm();
    let n = 2 * lmax + 48 + (8.0 * kr).ceil() as usize;
    let (theta, w) = gauss_legendre_interval(n, 0.0, PI);
    let i = C64::new(0.0, 1.0);
    let mut acc = vec![C64::new(0.0, 0.0); lmax + 1];
    for (th, wt) in theta.iter().zip(&w) {
        let half = 0.5 * th;
        let rr = 2.0 * r * half.sin();
        let phase = (i * kappa * rr).exp();
        let g = match kind {
            LayerKind::SingleLayer => phase * (0.5 * r * half.cos()),
            LayerKind::AdjointDoubleLayer | LayerKind::DoubleLayer => {
                phase * (i * kappa * rr - 1.0) * (0.25 * half.cos())
            }
        };
        let p = legendre_table(lmax, th.cos());
        for (a, pl) in acc.iter_mut().zip(&p) {
            *a += g * (wt * pl);
        }
    }
    acc
}

/// Nodal matrix `sum_l (lambda_l - c) Z_l(u_i . u_j) w_j + c delta_ij` with
/// `Z_l = (2l+1) P_l / (4 pi)` and `c` the eigenvalue at `lmax + 1`.
pub(super) fn assemble(
    kind: LayerKind,
    kappa: C64,
    r: f64,
    dirs: &[Vec3],
    dir_weights: &[f64],
    lmax: usize,
) -> Matrix {
    let lambda = sphere_eigenvalues(kind, kappa, r, lmax + 1);
    let c = lambda[lmax + 1];
    let coeffs: Vec<C64> = (0..=lmax)
        .map(|l| (lambda[l] - c) * ((2 * l + 1) as f64 / (4.0 * PI)))
        .collect();
    let n = dirs.len();
    crate::parallel::matrix_from_rows(n, n, |i| {
        (0..n)
            .map(|j| {
                let t = dirs[i].dot(dirs[j]).clamp(-1.0, 1.0);
                let mut v = legendre_series(&coeffs, t) * dir_weights[j];
                if i == j {
                    v += c;
                }
                v
            })
            .collect()
    })
}
