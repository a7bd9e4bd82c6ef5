//! Layer operators on an axis-aligned ellipsoid `y = c + T q`, `|q| = 1`.
//!
//! Each row integrates over the parameter sphere in polar coordinates about
//! the target parameter `q_i`; the `sin` of the polar angle cancels the
//! weak kernel singularity, so Gauss-Legendre x trapezoid converges
//! spectrally. The density is carried to the polar points by band-limited
//! interpolation from the nodes.

use super::{sphere::sphere_eigenvalues, LayerKind, SurfaceQuadrature};
use crate::linalg::Matrix;
use crate::numerics::{gauss_legendre_interval, legendre_series, Vec3, C64};
use std::f64::consts::PI;

pub(super) fn kernel(kind: LayerKind, kappa: C64, x: Vec3, nx: Vec3, y: Vec3, ny: Vec3) -> C64 {
    let d = x - y;
    let r = d.norm();
    let i = C64::new(0.0, 1.0);
    let e = (i * kappa * r).exp();
    match kind {
        LayerKind::SingleLayer => e / (4.0 * PI * r),
        LayerKind::AdjointDoubleLayer => {
            e * (i * kappa * r - 1.0) * (d.dot(nx) / (4.0 * PI * r * r * r))
        }
        LayerKind::DoubleLayer => e * (i * kappa * r - 1.0) * (-d.dot(ny) / (4.0 * PI * r * r * r)),
    }
}

pub(super) fn assemble(
    kind: LayerKind,
    kappa: C64,
    quad: &SurfaceQuadrature,
    t: Vec3,
    dirs: &[Vec3],
    dir_weights: &[f64],
    lmax: usize,
) -> Matrix {
    let r_eq = (t.x * t.y * t.z).cbrt();
    let c = sphere_eigenvalues(kind, kappa, r_eq, lmax + 1)[lmax + 1];
    let zl: Vec<f64> = (0..=lmax)
        .map(|l| (2 * l + 1) as f64 / (4.0 * PI))
        .collect();
    let det = t.x * t.y * t.z;
    let center = quad.shape.center;
    let n_p = lmax + 9;
    let n_az = 2 * n_p;
    let (theta, wt) = gauss_legendre_interval(n_p, 0.0, PI);
    let dphi = 2.0 * PI / n_az as f64;
    let n = dirs.len();
    crate::parallel::matrix_from_rows(n, n, |i| {
        let qi = dirs[i];
        let (e1, e2) = qi.orthonormal_frame();
        let x = quad.nodes[i];
        let nx = quad.normals[i];
        let mut pts = Vec::with_capacity(n_p * n_az);
        let mut kw = Vec::with_capacity(n_p * n_az);
        for (th, w) in theta.iter().zip(&wt) {
            let (st, ct) = th.sin_cos();
            for k in 0..n_az {
                let phi = k as f64 * dphi;
                let p = qi * ct + (e1 * phi.cos() + e2 * phi.sin()) * st;
                let tinv_p = Vec3::new(p.x / t.x, p.y / t.y, p.z / t.z);
                let y = center + p.hadamard(t);
                let ny = tinv_p.normalized();
                let jac = det * tinv_p.norm();
                pts.push(p);
                kw.push(kernel(kind, kappa, x, nx, y, ny) * (jac * st * w * dphi));
            }
        }
        (0..n)
            .map(|j| {
                let qj = dirs[j];
                let mut acc = C64::new(0.0, 0.0);
                for (p, k) in pts.iter().zip(&kw) {
                    acc += *k * legendre_series(&zl, p.dot(qj).clamp(-1.0, 1.0));
                }
                let proj = legendre_series(&zl, qi.dot(qj).clamp(-1.0, 1.0));
                let mut v = (acc - c * proj) * dir_weights[j];
                if i == j {
                    v += c;
                }
                v
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::super::{assemble_layer, build_quadrature};
    use super::*;
    use crate::geometry::BubbleShape;

    #[test]
    fn unit_axes_reproduce_sphere_operator() {
        let kappa = C64::new(1.3, 0.0);
        let sph = build_quadrature(&BubbleShape::sphere(Vec3::ZERO, 0.6), 1).unwrap();
        let ell = build_quadrature(&BubbleShape::ellipsoid(Vec3::ZERO, [0.6, 0.6, 0.6]), 1).unwrap();
        for kind in [
            LayerKind::SingleLayer,
            LayerKind::AdjointDoubleLayer,
            LayerKind::DoubleLayer,
        ] {
            let a = assemble_layer(&sph, kind, kappa).matrix;
            let b = assemble_layer(&ell, kind, kappa).matrix;
            let mut err: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    err = err.max((a[(i, j)] - b[(i, j)]).norm());
                    scale = scale.max(a[(i, j)].norm());
                }
            }
            assert!(err < 1e-9 * scale, "{kind:?}: {err:e} vs {scale:e}");
        }
    }
}
