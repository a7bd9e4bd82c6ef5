//! Bubble shapes, cluster generation and pairwise-distance statistics.

mod cluster;
mod mesh;

pub use cluster::{
    cluster_stats, distance_sum, generate_cluster, Cluster, ClusterExport, ClusterSpec,
    ClusterStats, DomainBox, Occupancy, Placement, RealizedStats, ShapeTemplate,
};
pub use mesh::TriMesh;

use crate::error::{Error, Result};
use crate::numerics::Vec3;
use serde::{Deserialize, Serialize};

/// Reference shape, before scaling and translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum ShapeKind {
    Sphere { radius: f64 },
    Ellipsoid { semi_axes: [f64; 3] },
    Mesh(TriMesh),
}

/// One bubble `D = center + scale * B`, with `B` described by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BubbleShape {
    pub kind: ShapeKind,
    pub center: Vec3,
    pub scale: f64,
}

impl BubbleShape {
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        BubbleShape {
            kind: ShapeKind::Sphere { radius },
            center,
            scale: 1.0,
        }
    }

    pub fn ellipsoid(center: Vec3, semi_axes: [f64; 3]) -> Self {
        BubbleShape {
            kind: ShapeKind::Ellipsoid { semi_axes },
            center,
            scale: 1.0,
        }
    }

    pub fn mesh(center: Vec3, mesh: TriMesh) -> Self {
        BubbleShape {
            kind: ShapeKind::Mesh(mesh),
            center,
            scale: 1.0,
        }
    }

    /// Same shape with the scale multiplied by `delta` about its center.
    pub fn scaled(&self, delta: f64) -> Self {
        BubbleShape {
            kind: self.kind.clone(),
            center: self.center,
            scale: self.scale * delta,
        }
    }

    pub fn translated(&self, v: Vec3) -> Self {
        BubbleShape {
            kind: self.kind.clone(),
            center: self.center + v,
            scale: self.scale,
        }
    }

    /// Radius of the smallest ball about `center` containing the bubble.
    pub fn circumradius(&self) -> f64 {
        self.scale
            * match &self.kind {
                ShapeKind::Sphere { radius } => *radius,
                ShapeKind::Ellipsoid { semi_axes } => semi_axes.iter().cloned().fold(0.0, f64::max),
                ShapeKind::Mesh(m) => m.max_vertex_distance(Vec3::ZERO),
            }
    }

    /// Radius of the largest ball about `center` inside the bubble. For
    /// meshes this is the smallest distance from the center to a face plane,
    /// which is exact for star-shaped convex-ish surfaces and a lower bound in
    /// general.
    pub fn inradius(&self) -> f64 {
        self.scale
            * match &self.kind {
                ShapeKind::Sphere { radius } => *radius,
                ShapeKind::Ellipsoid { semi_axes } => {
                    semi_axes.iter().cloned().fold(f64::INFINITY, f64::min)
                }
                ShapeKind::Mesh(m) => (0..m.triangles.len())
                    .map(|f| {
                        let [p, q, r] = m.triangle(f);
                        let n = (q - p).cross(r - p).normalized();
                        let plane = p.dot(n).abs();
                        let nearest = [p, q, r]
                            .iter()
                            .map(|v| v.norm())
                            .fold(f64::INFINITY, f64::min);
                        plane.min(nearest)
                    })
                    .fold(f64::INFINITY, f64::min),
            }
    }

    /// Diameter of the bubble (exact for spheres, ellipsoids and polyhedra).
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            ShapeKind::Mesh(m) => self.scale * m.diameter(),
            _ => 2.0 * self.circumradius(),
        }
    }

    /// Checks positivity of parameters and, for meshes, closedness and
    /// orientation.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid("geometry", format!("scale {} must be positive", self.scale)));
        }
        match &self.kind {
            ShapeKind::Sphere { radius } if !(*radius > 0.0) => {
                Err(Error::invalid("geometry", "sphere radius must be positive"))
            }
            ShapeKind::Ellipsoid { semi_axes } if semi_axes.iter().any(|a| !(*a > 0.0)) => {
                Err(Error::invalid("geometry", "ellipsoid semi-axes must be positive"))
            }
            ShapeKind::Mesh(m) => {
                let len = m.max_vertex_distance(Vec3::ZERO);
                m.validate(len)?;
                if m.min_vertex_distance(Vec3::ZERO) <= 0.0 {
                    return Err(Error::DegenerateMesh(
                        "the reference center lies on the surface".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Sandwich condition: the ball of radius `zeta * a / 2` about the center
    /// lies inside the bubble, and the bubble lies inside the ball of radius
    /// `a / 2`.
    pub fn satisfies_sandwich(&self, a: f64, zeta: f64) -> bool {
        let tol = 1e-12 * a;
        self.circumradius() <= 0.5 * a + tol && self.inradius() >= 0.5 * zeta * a - tol
    }

    /// Points on the boundary, used to check containment properties.
    pub fn sample_boundary(&self, n: usize) -> Vec<Vec3> {
        let dirs = crate::numerics::fibonacci_sphere(n);
        match &self.kind {
            ShapeKind::Sphere { radius } => dirs
                .iter()
                .map(|d| self.center + *d * (radius * self.scale))
                .collect(),
            ShapeKind::Ellipsoid { semi_axes } => dirs
                .iter()
                .map(|d| self.center + d.hadamard(Vec3::from(*semi_axes)) * self.scale)
                .collect(),
            ShapeKind::Mesh(m) => {
                let mut pts: Vec<Vec3> = m
                    .vertices
                    .iter()
                    .map(|v| self.center + *v * self.scale)
                    .collect();
                for f in 0..m.triangles.len() {
                    let [p, q, r] = m.triangle(f);
                    pts.push(self.center + (p + q + r) * (self.scale / 3.0));
                }
                pts
            }
        }
    }
}

/// Distance between the circumscribed balls of two bubbles (exact surface
/// distance for spheres, a lower bound otherwise).
pub fn surface_distance(b1: &BubbleShape, b2: &BubbleShape) -> f64 {
    b1.center.dist(b2.center) - b1.circumradius() - b2.circumradius()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_measures() {
        let b = BubbleShape::sphere(Vec3::new(1.0, 2.0, 3.0), 0.25);
        assert_eq!(b.diameter(), 0.5);
        assert!(b.satisfies_sandwich(0.5, 1.0));
        assert!(!b.satisfies_sandwich(0.4, 0.5));
        for p in b.sample_boundary(50) {
            assert!((p.dist(b.center) - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn two_spheres_surface_distance() {
        let b1 = BubbleShape::sphere(Vec3::ZERO, 0.01);
        let b2 = BubbleShape::sphere(Vec3::new(0.3, 0.0, 0.0), 0.01);
        assert!((surface_distance(&b1, &b2) - 0.28).abs() < 1e-15);
    }

    #[test]
    fn icosphere_diameter_close_to_sphere() {
        let r = 0.7;
        let b = BubbleShape::mesh(Vec3::ZERO, TriMesh::icosphere(r, 3));
        assert!((b.diameter() - 2.0 * r).abs() < 0.01 * 2.0 * r);
        assert!(b.inradius() > 0.98 * r);
    }

    #[test]
    fn ellipsoid_sandwich() {
        let b = BubbleShape::ellipsoid(Vec3::ZERO, [0.5, 0.25, 0.5]);
        assert!(b.satisfies_sandwich(1.0, 0.5));
        assert!(!b.satisfies_sandwich(1.0, 0.6));
    }
}
