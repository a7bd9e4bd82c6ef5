//! Geometric functionals of one bubble: `A(s)`, its boundary mean `A_hat`,
//! the capacitance, the volume and the surface centroid offset.

use crate::boundary_ops::{
    assemble_layer, build_quadrature, solve_single_layer, triangle_integrals, LayerKind,
    SurfaceQuadrature,
};
use crate::error::Result;
use crate::geometry::{BubbleShape, Cluster, ShapeKind};
use crate::numerics::{gauss_legendre_interval, pairwise_sum, Vec3, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default quadrature order for functionals.
pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeFunctionals {
    pub a_hat: f64,
    pub cap: f64,
    pub volume: f64,
    pub surface_area: f64,
    pub centroid_offset: Vec3,
}

/// `A(s) = int (s-t)/|s-t| . nu_t dsigma_t = -2 int_D 1/|s-y| dy` at the
/// quadrature node `node`.
pub fn compute_a_function(quad: &SurfaceQuadrature, node: usize) -> f64 {
    let shape = &quad.shape;
    let s = quad.nodes[node];
    match &shape.kind {
        ShapeKind::Sphere { radius } => {
            let r = radius * shape.scale;
            -(8.0 * PI / 3.0) * r * r
        }
        ShapeKind::Ellipsoid { semi_axes } => {
            let t = Vec3::from(*semi_axes) * shape.scale;
            ellipsoid_chord_integral(t, s - shape.center, quad.normals[node])
        }
        ShapeKind::Mesh(mesh) => {
            let phys = mesh.transformed(shape.scale, shape.center);
            let terms: Vec<f64> = (0..phys.triangles.len())
                .map(|f| {
                    let tri = phys.triangle(f);
                    let n = phys.area_vector(f).normalized();
                    let h = (tri[0] - s).dot(n);
                    if h.abs() <= 1e-13 * shape.circumradius() {
                        0.0
                    } else {
                        -h * triangle_integrals(s, tri).potential
                    }
                })
                .collect();
            pairwise_sum(&terms)
        }
    }
}

/// `-int R(w)^2 dw` over inward directions, `R` the chord length from the
/// boundary point `p` (relative to the center) of the ellipsoid with
/// semi-axes `t`.
fn ellipsoid_chord_integral(t: Vec3, p: Vec3, normal: Vec3) -> f64 {
    const N_POLAR: usize = 40;
    const N_AZ: usize = 80;
    let inward = -normal;
    let (e1, e2) = inward.orthonormal_frame();
    let (mu, wmu) = gauss_legendre_interval(N_POLAR, 0.0, 1.0);
    let dphi = 2.0 * PI / N_AZ as f64;
    let tinv_p = Vec3::new(p.x / t.x, p.y / t.y, p.z / t.z);
    let mut terms = Vec::with_capacity(N_POLAR * N_AZ);
    for (c, w) in mu.iter().zip(&wmu) {
        let st = (1.0 - c * c).max(0.0).sqrt();
        for k in 0..N_AZ {
            let phi = (k as f64 + 0.5) * dphi;
            let dir = inward * *c + (e1 * phi.cos() + e2 * phi.sin()) * st;
            let tinv_d = Vec3::new(dir.x / t.x, dir.y / t.y, dir.z / t.z);
            let r = (-2.0 * tinv_p.dot(tinv_d) / tinv_d.norm_sq()).max(0.0);
            terms.push(r * r * w * dphi);
        }
    }
    -pairwise_sum(&terms)
}

/// Boundary mean of `A`.
pub fn compute_a_hat(quad: &SurfaceQuadrature) -> f64 {
    let vals: Vec<f64> = crate::parallel::map_indices(quad.len(), |i| {
        quad.weights[i] * compute_a_function(quad, i)
    });
    pairwise_sum(&vals) / quad.area()
}

/// `int (S^0)^{-1}(1) dsigma`.
pub fn compute_capacitance(quad: &SurfaceQuadrature) -> Result<f64> {
    let op = assemble_layer(quad, LayerKind::SingleLayer, C64::new(0.0, 0.0));
    let g = solve_single_layer(&op, &vec![C64::new(1.0, 0.0); quad.len()])?;
    let terms: Vec<f64> = g.iter().zip(&quad.weights).map(|(v, w)| v.re * w).collect();
    Ok(pairwise_sum(&terms))
}

/// `(1/3) int (x - z) . nu dsigma`.
pub fn compute_volume(quad: &SurfaceQuadrature) -> f64 {
    let c = quad.shape.center;
    let terms: Vec<f64> = quad
        .nodes
        .iter()
        .zip(&quad.normals)
        .zip(&quad.weights)
        .map(|((x, n), w)| w * (*x - c).dot(*n))
        .collect();
    pairwise_sum(&terms) / 3.0
}

pub fn compute_functionals(shape: &BubbleShape, order: usize) -> Result<ShapeFunctionals> {
    let quad = build_quadrature(shape, order)?;
    Ok(ShapeFunctionals {
        a_hat: compute_a_hat(&quad),
        cap: compute_capacitance(&quad)?,
        volume: compute_volume(&quad),
        surface_area: quad.area(),
        centroid_offset: quad.surface_centroid() - shape.center,
    })
}

/// Functionals of every bubble. Bubbles that differ only by translation
/// share one computation.
pub fn cluster_functionals(cluster: &Cluster, order: usize) -> Result<Vec<ShapeFunctionals>> {
    let mut unique: Vec<BubbleShape> = Vec::new();
    let mut index = Vec::with_capacity(cluster.len());
    for b in &cluster.bubbles {
        let key = BubbleShape {
            center: Vec3::ZERO,
            ..b.clone()
        };
        match unique.iter().position(|u| *u == key) {
            Some(k) => index.push(k),
            None => {
                unique.push(key);
                index.push(unique.len() - 1);
            }
        }
    }
    let computed = crate::parallel::map_indices(unique.len(), |k| compute_functionals(&unique[k], order));
    let computed = computed.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(index.into_iter().map(|k| computed[k]).collect())
}
