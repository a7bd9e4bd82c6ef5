use crate::error::{Error, Result};
use crate::numerics::Vec3;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Closed triangulated surface with 0-based indices and outward
/// counter-clockwise orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
        }
    }

    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        let [i, j, k] = self.triangles[f];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }

    /// Unnormalized normal; its length is twice the triangle area.
    pub fn area_vector(&self, f: usize) -> Vec3 {
        let [p, q, r] = self.triangle(f);
        (q - p).cross(r - p)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|f| 0.5 * self.area_vector(f).norm())
            .sum()
    }

    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|f| {
                let [p, q, r] = self.triangle(f);
                p.dot(q.cross(r)) / 6.0
            })
            .sum()
    }

    pub fn max_vertex_distance(&self, from: Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dist(from))
            .fold(0.0, f64::max)
    }

    pub fn min_vertex_distance(&self, from: Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dist(from))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest vertex-to-vertex distance (exact diameter of the polyhedron).
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }

    pub fn transformed(&self, scale: f64, shift: Vec3) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| *v * scale + shift).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Checks closedness, consistent orientation, outward orientation and
    /// triangle non-degeneracy (area > 1e-12 * length_scale^2).
    pub fn validate(&self, length_scale: f64) -> Result<()> {
        if self.triangles.len() < 4 {
            return Err(Error::DegenerateMesh(format!(
                "{} triangles cannot enclose a volume",
                self.triangles.len()
            )));
        }
        let nv = self.vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::DegenerateMesh(format!(
                    "triangle {f} references a vertex index out of range (vertex count {nv})"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateMesh(format!("triangle {f} repeats a vertex")));
            }
            let area = 0.5 * self.area_vector(f).norm();
            if area <= 1e-12 * length_scale * length_scale {
                return Err(Error::DegenerateMesh(format!(
                    "triangle {f} has area {area:.3e}"
                )));
            }
            for e in 0..3 {
                let key = (tri[e], tri[(e + 1) % 3]);
                if directed.insert(key, f).is_some() {
                    return Err(Error::DegenerateMesh(format!(
                        "edge {}-{} is traversed twice in the same direction (inconsistent orientation or non-manifold)",
                        key.0, key.1
                    )));
                }
            }
        }
        for &(i, j) in directed.keys() {
            if !directed.contains_key(&(j, i)) {
                return Err(Error::DegenerateMesh(format!(
                    "edge {i}-{j} has no opposite half-edge (surface is not closed)"
                )));
            }
        }
        let vol = self.signed_volume();
        if vol <= 0.0 {
            return Err(Error::DegenerateMesh(format!(
                "enclosed signed volume {vol:.3e} is not positive (triangles are not outward oriented)"
            )));
        }
        Ok(())
    }

    /// Parses the ASCII surface format: vertex count, `x y z` lines,
    /// triangle count, `i j k` lines (0-based).
    pub fn from_ascii(text: &str) -> Result<TriMesh> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split_whitespace());
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::DegenerateMesh(format!("unexpected end of file reading {what}")))
        };
        let parse_usize = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::DegenerateMesh(format!("cannot parse {what} from '{s}'")))
        };
        let parse_f64 = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::DegenerateMesh(format!("cannot parse {what} from '{s}'")))
        };
        let nv = parse_usize(next("vertex count")?, "vertex count")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let x = parse_f64(next("vertex")?, "coordinate")?;
            let y = parse_f64(next("vertex")?, "coordinate")?;
            let z = parse_f64(next("vertex")?, "coordinate")?;
            vertices.push(Vec3::new(x, y, z));
        }
        let nt = parse_usize(next("triangle count")?, "triangle count")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let i = parse_usize(next("triangle")?, "vertex index")?;
            let j = parse_usize(next("triangle")?, "vertex index")?;
            let k = parse_usize(next("triangle")?, "vertex index")?;
            triangles.push([i, j, k]);
        }
        Ok(TriMesh {
            vertices,
            triangles,
        })
    }

    pub fn to_ascii(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:e} {:e} {:e}", v.x, v.y, v.z);
        }
        let _ = writeln!(s, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    /// Subdivided icosahedron with vertices on the sphere of `radius` about
    /// the origin. Refinement 0 is the icosahedron (20 faces); each level
    /// multiplies the face count by 4.
    pub fn icosphere(radius: f64, refinement: usize) -> TriMesh {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1.0, g, 0.0),
            (1.0, g, 0.0),
            (-1.0, -g, 0.0),
            (1.0, -g, 0.0),
            (0.0, -1.0, g),
            (0.0, 1.0, g),
            (0.0, -1.0, -g),
            (0.0, 1.0, -g),
            (g, 0.0, -1.0),
            (g, 0.0, 1.0),
            (-g, 0.0, -1.0),
            (-g, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..refinement {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(tris.len() * 4);
            let mut midpoint = |i: usize, j: usize, verts: &mut Vec<Vec3>| {
                let key = (i.min(j), i.max(j));
                *mid.entry(key).or_insert_with(|| {
                    verts.push(((verts[i] + verts[j]) * 0.5).normalized());
                    verts.len() - 1
                })
            };
            for [a, b, c] in tris {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            tris = next;
        }
        TriMesh {
            vertices: verts.into_iter().map(|v| v * radius).collect(),
            triangles: tris,
        }
    }

    /// Random star-shaped surface: an icosphere whose vertices are moved
    /// radially to `1 + sum of smooth bumps`, with the radius kept in
    /// `[1 - amplitude, 1 + amplitude]`.
    pub fn random_star_shaped<R: Rng + ?Sized>(
        rng: &mut R,
        refinement: usize,
        amplitude: f64,
    ) -> TriMesh {
        let base = TriMesh::icosphere(1.0, refinement);
        let bumps: Vec<(Vec3, f64, f64)> = (0..5)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let rho = (1.0 - z * z).sqrt();
                let dir = Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
                let weight: f64 = rng.random_range(-1.0..1.0);
                let width: f64 = rng.random_range(1.0..4.0);
                (dir, weight, width)
            })
            .collect();
        let raw: Vec<f64> = base
            .vertices
            .iter()
            .map(|v| {
                bumps
                    .iter()
                    .map(|(d, w, k)| w * (k * (v.dot(*d) - 1.0)).exp())
                    .sum()
            })
            .collect();
        let peak = raw.iter().fold(1e-300_f64, |m, r| m.max(r.abs()));
        TriMesh {
            vertices: base
                .vertices
                .iter()
                .zip(&raw)
                .map(|(v, r)| *v * (1.0 + amplitude * r / peak))
                .collect(),
            triangles: base.triangles,
        }
    }
}
