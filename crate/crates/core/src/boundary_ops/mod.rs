//! Layer potentials on one bubble surface: single layer `S`, adjoint double
//! layer `K*` and double layer `K`, discretized on surface quadratures.
//!
//! Spheres and ellipsoids use a Gauss-Legendre x trapezoid grid on the
//! parameter sphere and spectral (band-limited) operators; meshes use
//! piecewise-constant collocation on flat sub-panels with analytic singular
//! integrals.

mod ellipsoid;
mod panels;
mod sphere;

pub use panels::{triangle_integrals, TriangleIntegrals};
pub use sphere::sphere_eigenvalues;

use crate::error::{Error, Result};
use crate::geometry::{BubbleShape, ShapeKind};
use crate::linalg::{self, Matrix};
use crate::numerics::{pairwise_sum, Vec3, C64};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Nodes, area weights and outward unit normals on one bubble surface.
#[derive(Debug, Clone)]
pub struct SurfaceQuadrature {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vec3>,
    pub bubble_ref: usize,
    pub shape: BubbleShape,
    pub order: usize,
    pub(crate) disc: Discretization,
}

#[derive(Debug, Clone)]
pub(crate) enum Discretization {
    /// Product grid on the parameter sphere; `dirs` and `dir_weights` are
    /// unit-sphere nodes and weights, `lmax` the band limit.
    Spectral {
        dirs: Vec<Vec3>,
        dir_weights: Vec<f64>,
        lmax: usize,
    },
    /// Flat sub-panels in physical coordinates.
    Panels { panels: Vec<[Vec3; 3]> },
}

impl SurfaceQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Surface-measure mean of the boundary points.
    pub fn surface_centroid(&self) -> Vec3 {
        let area = self.area();
        let comp = |f: fn(&Vec3) -> f64| {
            let v: Vec<f64> = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(x))
                .collect();
            pairwise_sum(&v) / area
        };
        Vec3::new(comp(|v| v.x), comp(|v| v.y), comp(|v| v.z))
    }

    /// Band limit for spectral grids, `None` for panels.
    pub fn band_limit(&self) -> Option<usize> {
        match &self.disc {
            Discretization::Spectral { lmax, .. } => Some(*lmax),
            Discretization::Panels { .. } => None,
        }
    }
}

/// Number of Gauss-Legendre latitudes used at a given order.
pub fn spectral_latitudes(order: usize) -> usize {
    4 * (order + 1)
}

/// Builds the surface quadrature of `shape`. For spheres and ellipsoids
/// `order` selects `4(order+1)` latitudes; for meshes each triangle is split
/// into `4^(order-1)` sub-panels (order >= 1).
pub fn build_quadrature(shape: &BubbleShape, order: usize) -> Result<SurfaceQuadrature> {
    shape.validate()?;
    let s = shape.scale;
    let c = shape.center;
    match &shape.kind {
        ShapeKind::Sphere { radius } => {
            let r = radius * s;
            let n_theta = spectral_latitudes(order);
            let rule = crate::numerics::SphereProductRule::new(n_theta, 2 * n_theta);
            Ok(SurfaceQuadrature {
                nodes: rule.directions.iter().map(|d| c + *d * r).collect(),
                weights: rule.weights.iter().map(|w| w * r * r).collect(),
                normals: rule.directions.clone(),
                bubble_ref: 0,
                shape: shape.clone(),
                order,
                disc: Discretization::Spectral {
                    dirs: rule.directions,
                    dir_weights: rule.weights,
                    lmax: n_theta - 1,
                },
            })
        }
        ShapeKind::Ellipsoid { semi_axes } => {
            let t = Vec3::from(*semi_axes) * s;
            let n_theta = spectral_latitudes(order);
            let rule = crate::numerics::SphereProductRule::new(n_theta, 2 * n_theta);
            let det = t.x * t.y * t.z;
            let mut nodes = Vec::with_capacity(rule.len());
            let mut weights = Vec::with_capacity(rule.len());
            let mut normals = Vec::with_capacity(rule.len());
            for (q, w) in rule.directions.iter().zip(&rule.weights) {
                let tinv_q = Vec3::new(q.x / t.x, q.y / t.y, q.z / t.z);
                nodes.push(c + q.hadamard(t));
                weights.push(w * det * tinv_q.norm());
                normals.push(tinv_q.normalized());
            }
            Ok(SurfaceQuadrature {
                nodes,
                weights,
                normals,
                bubble_ref: 0,
                shape: shape.clone(),
                order,
                disc: Discretization::Spectral {
                    dirs: rule.directions,
                    dir_weights: rule.weights,
                    lmax: n_theta - 1,
                },
            })
        }
        ShapeKind::Mesh(mesh) => {
            if order == 0 {
                return Err(Error::invalid("boundary_ops", "mesh quadrature order must be >= 1"));
            }
            let physical = mesh.transformed(s, c);
            let mut panels = Vec::new();
            for f in 0..physical.triangles.len() {
                panels::subdivide(physical.triangle(f), order - 1, &mut panels);
            }
            let mut nodes = Vec::with_capacity(panels.len());
            let mut weights = Vec::with_capacity(panels.len());
            let mut normals = Vec::with_capacity(panels.len());
            for p in &panels {
                let av = (p[1] - p[0]).cross(p[2] - p[0]);
                let area = 0.5 * av.norm();
                if area <= 1e-12 * (2.0 * shape.circumradius()).powi(2) {
                    return Err(Error::DegenerateMesh(format!(
                        "sub-panel area {area:.3e} is degenerate"
                    )));
                }
                nodes.push((p[0] + p[1] + p[2]) / 3.0);
                weights.push(area);
                normals.push(av.normalized());
            }
            Ok(SurfaceQuadrature {
                nodes,
                weights,
                normals,
                bubble_ref: 0,
                shape: shape.clone(),
                order,
                disc: Discretization::Panels { panels },
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LayerKind {
    /// `S phi(x) = int Phi(x,y) phi(y) dsigma_y`
    SingleLayer,
    /// `K* phi(x) = int d/dnu_x Phi(x,y) phi(y) dsigma_y`
    AdjointDoubleLayer,
    /// `K phi(x) = int d/dnu_y Phi(x,y) phi(y) dsigma_y`
    DoubleLayer,
}

/// Dense discretized layer operator acting on density samples at the
/// quadrature nodes.
#[derive(Debug, Clone)]
pub struct LayerOperator {
    pub kind: LayerKind,
    pub wavenumber: C64,
    pub matrix: Matrix,
}

impl LayerOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, density: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.matrix, density)
    }

    pub fn apply_real(&self, density: &[f64]) -> Vec<C64> {
        let d: Vec<C64> = density.iter().map(|v| C64::new(*v, 0.0)).collect();
        self.apply(&d)
    }

    /// Writes the matrix row-major as little-endian `(re, im)` f64 pairs.
    pub fn dump<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        dump_matrix(&self.matrix, path)
    }
}

/// Row-major little-endian dump of a complex matrix as `(re, im)` f64 pairs.
pub fn dump_matrix<P: AsRef<Path>>(m: &Matrix, path: P) -> Result<()> {
    let mut buf = Vec::with_capacity(m.nrows() * m.ncols() * 16);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Assembles the dense operator of `kind` at wavenumber `kappa`.
pub fn assemble_layer(quad: &SurfaceQuadrature, kind: LayerKind, kappa: C64) -> LayerOperator {
    let matrix = match (&quad.shape.kind, &quad.disc) {
        (ShapeKind::Sphere { radius }, Discretization::Spectral { dirs, dir_weights, lmax }) => {
            sphere::assemble(kind, kappa, radius * quad.shape.scale, dirs, dir_weights, *lmax)
        }
        (ShapeKind::Ellipsoid { semi_axes }, Discretization::Spectral { dirs, dir_weights, lmax }) => {
            ellipsoid::assemble(
                kind,
                kappa,
                quad,
                Vec3::from(*semi_axes) * quad.shape.scale,
                dirs,
                dir_weights,
                *lmax,
            )
        }
        (_, Discretization::Panels { panels }) => panels::assemble(kind, kappa, quad, panels),
        _ => unreachable!("quadrature discretization does not match its shape"),
    };
    LayerOperator {
        kind,
        wavenumber: kappa,
        matrix,
    }
}

/// Solves `S g = rhs` for a static single layer.
pub fn solve_single_layer(op: &LayerOperator, rhs: &[C64]) -> Result<Vec<C64>> {
    if op.kind != LayerKind::SingleLayer || op.wavenumber != C64::new(0.0, 0.0) {
        return Err(Error::invalid(
            "boundary_ops",
            "solve_single_layer expects the static single layer operator",
        ));
    }
    if rhs.len() != op.dim() {
        return Err(Error::invalid(
            "boundary_ops",
            format!("right-hand side has {} entries, operator has {}", rhs.len(), op.dim()),
        ));
    }
    let sol = linalg::dense_solve(&op.matrix, rhs, "boundary_ops")?;
    if sol.residual > 1e-8 {
        return Err(Error::singular(
            "boundary_ops",
            sol.condition,
            format!("single layer residual {:.3e} exceeds 1e-8", sol.residual),
        ));
    }
    Ok(sol.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ones(n: usize) -> Vec<C64> {
        vec![C64::new(1.0, 0.0); n]
    }

    #[test]
    fn sphere_area_and_homogeneity() {
        let b = BubbleShape::sphere(Vec3::ZERO, 1.0);
        let q = build_quadrature(&b, 2).unwrap();
        assert!((q.area() - 4.0 * PI).abs() < 0.005 * 4.0 * PI);
        let q2 = build_quadrature(&b.scaled(0.1), 2).unwrap();
        assert_eq!(q.len(), q2.len());
        for (w1, w2) in q.weights.iter().zip(&q2.weights) {
            assert!((w2 - 0.01 * w1).abs() <= 1e-15 * w1);
        }
    }

    #[test]
    fn node_count_increases_with_order() {
        let shapes = [
            BubbleShape::sphere(Vec3::ZERO, 1.0),
            BubbleShape::ellipsoid(Vec3::ZERO, [1.0, 0.7, 0.5]),
            BubbleShape::mesh(Vec3::ZERO, crate::geometry::TriMesh::icosphere(1.0, 1)),
        ];
        for s in &shapes {
            let mut last = 0;
            for order in 1..4 {
                let n = build_quadrature(s, order).unwrap().len();
                assert!(n > last);
                last = n;
            }
        }
    }

    #[test]
    fn normals_point_outward() {
        let shapes = [
            BubbleShape::sphere(Vec3::new(0.1, 0.0, 0.0), 1.0),
            BubbleShape::ellipsoid(Vec3::ZERO, [1.0, 1.0, 0.5]),
            BubbleShape::mesh(Vec3::ZERO, crate::geometry::TriMesh::icosphere(1.0, 2)),
        ];
        for s in &shapes {
            let q = build_quadrature(s, 2).unwrap();
            for (x, n) in q.nodes.iter().zip(&q.normals) {
                assert!((n.norm() - 1.0).abs() < 1e-12);
                let out = *x + *n * 1e-3 - s.center;
                let inside = match &s.kind {
                    ShapeKind::Sphere { radius } => out.norm() < *radius,
                    ShapeKind::Ellipsoid { semi_axes } => {
                        (out.x / semi_axes[0]).powi(2)
                            + (out.y / semi_axes[1]).powi(2)
                            + (out.z / semi_axes[2]).powi(2)
                            < 1.0
                    }
                    ShapeKind::Mesh(_) => out.norm() < 0.95,
                };
                assert!(!inside);
            }
        }
    }

    #[test]
    fn static_single_layer_on_sphere() {
        let r = 0.37;
        let q = build_quadrature(&BubbleShape::sphere(Vec3::ZERO, r), 2).unwrap();
        let op = assemble_layer(&q, LayerKind::SingleLayer, C64::new(0.0, 0.0));
        for v in op.apply(&ones(q.len())) {
            assert!((v.re - r).abs() < 1e-10 * r && v.im.abs() < 1e-14);
        }
        let g = solve_single_layer(&op, &ones(q.len())).unwrap();
        for v in &g {
            assert!((v.re - 1.0 / r).abs() < 1e-9 / r);
        }
        let zero = solve_single_layer(&op, &vec![C64::new(0.0, 0.0); q.len()]).unwrap();
        assert!(zero.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_layer_round_trip() {
        let q = build_quadrature(&BubbleShape::ellipsoid(Vec3::ZERO, [1.0, 0.8, 0.6]), 1).unwrap();
        let op = assemble_layer(&q, LayerKind::SingleLayer, C64::new(0.0, 0.0));
        let h: Vec<C64> = q
            .nodes
            .iter()
            .map(|x| C64::new(1.0 + x.x * x.y, x.z))
            .collect();
        let rhs = op.apply(&h);
        let back = solve_single_layer(&op, &rhs).unwrap();
        for (a, b) in back.iter().zip(&h) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn dump_writes_little_endian_pairs() {
        let q = build_quadrature(&BubbleShape::sphere(Vec3::ZERO, 1.0), 0).unwrap();
        let op = assemble_layer(&q, LayerKind::SingleLayer, C64::new(1.0, 0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        op.dump(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), q.len() * q.len() * 16);
        let re = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        assert_eq!(C64::new(re, im), op.matrix[(0, 1)]);
    }
}
