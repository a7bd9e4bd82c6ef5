//! Piecewise-constant collocation on flat triangles. The static parts of the
//! kernels are integrated analytically over nearby panels; the smooth
//! wavenumber-dependent remainder uses a 7-point rule there, and far panels
//! use a 3-point rule on the full kernel.

use super::{ellipsoid::kernel, LayerKind, SurfaceQuadrature};
use crate::linalg::Matrix;
use crate::numerics::{Vec3, C64};
use std::f64::consts::PI;

/// Degree-5 rule (Dunavant): barycentric coordinates and weights summing to 1.
const RULE7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([0.059715871789770, 0.470142064105115, 0.470142064105115], 0.132394152788506),
    ([0.470142064105115, 0.059715871789770, 0.470142064105115], 0.132394152788506),
    ([0.470142064105115, 0.470142064105115, 0.059715871789770], 0.132394152788506),
    ([0.797426985353087, 0.101286507323456, 0.101286507323456], 0.125939180544827),
    ([0.101286507323456, 0.797426985353087, 0.101286507323456], 0.125939180544827),
    ([0.101286507323456, 0.101286507323456, 0.797426985353087], 0.125939180544827),
];

const RULE3: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

/// Panels closer than this many diameters get the singular treatment.
const NEAR_FACTOR: f64 = 6.0;

pub(super) fn subdivide(tri: [Vec3; 3], levels: usize, out: &mut Vec<[Vec3; 3]>) {
    if levels == 0 {
        out.push(tri);
        return;
    }
    let [a, b, c] = tri;
    let ab = (a + b) * 0.5;
    let bc = (b + c) * 0.5;
    let ca = (c + a) * 0.5;
    subdivide([a, ab, ca], levels - 1, out);
    subdivide([b, bc, ab], levels - 1, out);
    subdivide([c, ca, bc], levels - 1, out);
    subdivide([ab, bc, ca], levels - 1, out);
}

/// Closed-form integrals over a flat triangle seen from `x`.
#[derive(Debug, Clone, Copy)]
pub struct TriangleIntegrals {
    /// `int 1/|x-y| dsigma_y`
    pub potential: f64,
    /// `int (x-y)/|x-y|^3 dsigma_y`
    pub gradient: Vec3,
    /// `int (y-x).n/|x-y|^3 dsigma_y`, the signed solid angle (Van
    /// Oosterom-Strackee); zero for points in the triangle's plane.
    pub solid_angle: f64,
}

pub fn triangle_integrals(x: Vec3, tri: [Vec3; 3]) -> TriangleIntegrals {
    let [a, b, c] = tri;
    let nvec = (b - a).cross(c - a);
    let n = nvec.normalized();
    let diam = (b - a).norm().max((c - b).norm()).max((a - c).norm());
    let w = (x - a).dot(n);
    let (ra, rb, rc) = (a - x, b - x, c - x);
    let (la, lb, lc) = (ra.norm(), rb.norm(), rc.norm());
    let solid_angle = if w.abs() <= 1e-13 * diam {
        0.0
    } else {
        let num = ra.dot(rb.cross(rc));
        let den = la * lb * lc + ra.dot(rb) * lc + ra.dot(rc) * lb + rb.dot(rc) * la;
        2.0 * num.atan2(den)
    };
    let mut pot = 0.0;
    let mut grad = Vec3::ZERO;
    for (p, q) in [(a, b), (b, c), (c, a)] {
        let edge = q - p;
        let len = edge.norm();
        let s = edge / len;
        let m = s.cross(n);
        let t = (p - x).dot(m);
        let lm = (p - x).dot(s);
        let lp = (q - x).dot(s);
        let rm = (p - x).norm();
        let rp = (q - x).norm();
        let r0sq = t * t + w * w;
        let f = if r0sq <= (1e-14 * diam).powi(2) && lm <= 0.0 && lp >= 0.0 {
            0.0
        } else if lp + lm >= 0.0 {
            ((rp + lp) / (rm + lm)).ln()
        } else {
            ((rm - lm) / (rp - lp)).ln()
        };
        pot += t * f;
        grad += m * f;
    }
    pot += w * solid_angle;
    grad = grad - n * solid_angle;
    TriangleIntegrals {
        potential: pot,
        gradient: grad,
        solid_angle,
    }
}

/// `(e^{i k r} - 1) / r`, stable for small `k r`.
fn helmholtz_remainder(kappa: C64, r: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let z = i * kappa * r;
    if z.norm() < 1e-3 {
        i * kappa * (1.0 + z * 0.5 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (z.exp() - 1.0) / r
    }
}

/// `(e^{i k r}(i k r - 1) + 1) / r^3`, stable for small `k r`.
fn gradient_remainder(kappa: C64, r: f64) -> C64 {
    let z = C64::new(0.0, 1.0) * kappa * r;
    if z.norm() < 1e-3 {
        // e^z (z - 1) + 1 = z^2/2 + z^3/3 + z^4/8 + z^5/30
        let k = kappa * C64::new(0.0, 1.0);
        k * k * (0.5 / r + z / (3.0 * r) + z * z / (8.0 * r) + z * z * z / (30.0 * r))
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (r * r * r)
    }
}

fn point(tri: &[Vec3; 3], bary: [f64; 3]) -> Vec3 {
    tri[0] * bary[0] + tri[1] * bary[1] + tri[2] * bary[2]
}

pub(super) fn assemble(
    kind: LayerKind,
    kappa: C64,
    quad: &SurfaceQuadrature,
    panels: &[[Vec3; 3]],
) -> Matrix {
    let n = panels.len();
    let is_static = kappa == C64::new(0.0, 0.0);
    let diam: Vec<f64> = panels
        .iter()
        .map(|p| (p[1] - p[0]).norm().max((p[2] - p[1]).norm()).max((p[0] - p[2]).norm()))
        .collect();
    crate::parallel::matrix_from_rows(n, n, |i| {
        let x = quad.nodes[i];
        let nx = quad.normals[i];
        (0..n)
            .map(|j| {
                let tri = &panels[j];
                let area = quad.weights[j];
                let ny = quad.normals[j];
                let near = (x - quad.nodes[j]).norm() < NEAR_FACTOR * diam[j];
                if !near {
                    return RULE3
                        .iter()
                        .map(|(b, w)| kernel(kind, kappa, x, nx, point(tri, *b), ny) * (w * area))
                        .sum();
                }
                let ti = triangle_integrals(x, *tri);
                let mut v = C64::new(
                    match kind {
                        LayerKind::SingleLayer => ti.potential / (4.0 * PI),
                        LayerKind::AdjointDoubleLayer => -nx.dot(ti.gradient) / (4.0 * PI),
                        LayerKind::DoubleLayer => -ti.solid_angle / (4.0 * PI),
                    },
                    0.0,
                );
                if i == j && kind != LayerKind::SingleLayer {
                    v = C64::new(0.0, 0.0);
                }
                if !is_static {
                    for (b, w) in RULE7.iter() {
                        let y = point(tri, *b);
                        let d = x - y;
                        let r = d.norm();
                        let rem = match kind {
                            LayerKind::SingleLayer => {
                                if r < 1e-14 * diam[j] {
                                    C64::new(0.0, 1.0) * kappa
                                } else {
                                    helmholtz_remainder(kappa, r)
                                }
                            }
                            LayerKind::AdjointDoubleLayer => {
                                if r < 1e-14 * diam[j] {
                                    C64::new(0.0, 0.0)
                                } else {
                                    gradient_remainder(kappa, r) * d.dot(nx)
                                }
                            }
                            LayerKind::DoubleLayer => {
                                if r < 1e-14 * diam[j] {
                                    C64::new(0.0, 0.0)
                                } else {
                                    -gradient_remainder(kappa, r) * d.dot(ny)
                                }
                            }
                        };
                        v += rem * (w * area / (4.0 * PI));
                    }
                }
                v
            })
            .collect()
    })
}
