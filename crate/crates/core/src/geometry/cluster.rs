use super::{surface_distance, BubbleShape, ShapeKind, TriMesh};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const MAX_REJECTIONS: usize = 10_000;
const MAX_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl Default for DomainBox {
    fn default() -> Self {
        DomainBox {
            min: Vec3::ZERO,
            max: Vec3::new(1.0, 1.0, 1.0),
        }
    }
}

impl DomainBox {
    pub fn lengths(&self) -> Vec3 {
        self.max - self.min
    }
}

/// Number of bubbles placed in each subcube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Occupancy {
    Fixed(u32),
    Bernoulli(f64),
}

impl Default for Occupancy {
    fn default() -> Self {
        Occupancy::Fixed(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Placement {
    #[default]
    Jitter,
    Centered,
}

/// Reference shape of diameter 1; every bubble is this shape scaled by `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind", deny_unknown_fields)]
pub enum ShapeTemplate {
    Sphere,
    /// Axis-aligned ellipsoid; semi-axes are rescaled so the largest is 1/2.
    #[serde(rename_all = "camelCase")]
    Ellipsoid { semi_axes: [f64; 3] },
    Icosphere { refinement: usize },
    /// Explicit mesh about the origin, rescaled to circumradius 1/2.
    Mesh { vertices: Vec<Vec3>, triangles: Vec<[usize; 3]> },
}

impl Default for ShapeTemplate {
    fn default() -> Self {
        ShapeTemplate::Sphere
    }
}

impl ShapeTemplate {
    pub fn reference_kind(&self) -> Result<ShapeKind> {
        Ok(match self {
            ShapeTemplate::Sphere => ShapeKind::Sphere { radius: 0.5 },
            ShapeTemplate::Ellipsoid { semi_axes } => {
                let m = semi_axes.iter().cloned().fold(0.0, f64::max);
                if semi_axes.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::invalid("geometry", "ellipsoid semi-axes must be positive"));
                }
                ShapeKind::Ellipsoid {
                    semi_axes: semi_axes.map(|s| 0.5 * s / m),
                }
            }
            ShapeTemplate::Icosphere { refinement } => {
                ShapeKind::Mesh(TriMesh::icosphere(0.5, *refinement))
            }
            ShapeTemplate::Mesh {
                vertices,
                triangles,
            } => {
                let mesh = TriMesh::new(vertices.clone(), triangles.clone());
                let r = mesh.max_vertex_distance(Vec3::ZERO);
                if !(r > 0.0) {
                    return Err(Error::DegenerateMesh("mesh has no extent".into()));
                }
                let mesh = mesh.transformed(0.5 / r, Vec3::ZERO);
                mesh.validate(1.0)?;
                ShapeKind::Mesh(mesh)
            }
        })
    }
}

fn default_d_min() -> f64 {
    0.5
}
fn default_d_max() -> f64 {
    4.0
}
fn default_m_max() -> f64 {
    4.0
}

/// Parameters of the cluster generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(default)]
    pub domain_box: DomainBox,
    /// Maximal bubble diameter.
    pub a: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub occupancy: Occupancy,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_d_min")]
    pub d_min_factor: f64,
    #[serde(default = "default_d_max")]
    pub d_max_factor: f64,
    /// Constant in `M <= M_max a^{-s}`.
    #[serde(default = "default_m_max")]
    pub m_max: f64,
    #[serde(default)]
    pub shape: ShapeTemplate,
    /// Lower bound on the inner sandwich ratio.
    #[serde(default)]
    pub zeta_min: f64,
    /// Explicit centers; bypasses the subcube construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec3>>,
}

impl ClusterSpec {
    pub fn new(a: f64, s: f64, t: f64, seed: u64) -> Self {
        ClusterSpec {
            domain_box: DomainBox::default(),
            a,
            s,
            t,
            occupancy: Occupancy::default(),
            placement: Placement::default(),
            seed,
            d_min_factor: default_d_min(),
            d_max_factor: default_d_max(),
            m_max: default_m_max(),
            shape: ShapeTemplate::default(),
            zeta_min: 0.0,
            centers: None,
        }
    }

    /// Explicitly placed spheres of diameter `a`.
    pub fn explicit(a: f64, centers: Vec<Vec3>) -> Self {
        let mut spec = ClusterSpec::new(a, 0.0, 0.0, 0);
        spec.centers = Some(centers);
        spec
    }

    /// `alpha` in `3 alpha t = s`; 1 when `t = 0`.
    pub fn alpha(&self) -> f64 {
        if self.t == 0.0 {
            1.0
        } else {
            self.s / (3.0 * self.t)
        }
    }

    /// Checks the regime hypotheses and returns the first violated one.
    pub fn check_regime(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InfeasibleRegime(msg));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return fail(format!("a = {} must be positive", self.a));
        }
        if !(0.0..0.5).contains(&self.t) {
            return fail(format!("0 <= t < 1/2 violated (t = {})", self.t));
        }
        if !(0.0..=1.5).contains(&self.s) {
            return fail(format!("0 <= s <= 3/2 violated (s = {})", self.s));
        }
        if self.t == 0.0 && self.s > 0.0 {
            return fail(format!("t = 0 requires s = 0 (s = {})", self.s));
        }
        if self.t + 1e-12 < self.s / 3.0 {
            return fail(format!(
                "t >= s/3 violated (t = {}, s/3 = {})",
                self.t,
                self.s / 3.0
            ));
        }
        if !(self.d_min_factor >= 0.0 && self.d_max_factor >= self.d_min_factor) {
            return fail(format!(
                "need 0 <= dMinFactor <= dMaxFactor (got {}, {})",
                self.d_min_factor, self.d_max_factor
            ));
        }
        let l = self.domain_box.lengths();
        if !(l.x > 0.0 && l.y > 0.0 && l.z > 0.0) {
            return Err(Error::invalid("geometry", "domain box has non-positive extent"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RealizedStats {
    #[serde(rename = "M")]
    pub m: usize,
    pub a: f64,
    /// Minimal pairwise surface distance; infinite for a single bubble.
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cluster {
    pub bubbles: Vec<BubbleShape>,
    pub realized_stats: RealizedStats,
    /// Side length of the subcubes used during generation.
    pub subcube_side: f64,
    pub spec: ClusterSpec,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.bubbles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bubbles.is_empty()
    }

    pub fn centers(&self) -> Vec<Vec3> {
        self.bubbles.iter().map(|b| b.center).collect()
    }

    /// Builds a cluster from explicit bubbles; `a` is taken as the largest
    /// diameter.
    pub fn from_bubbles(bubbles: Vec<BubbleShape>) -> Result<Cluster> {
        if bubbles.is_empty() {
            return Err(Error::InfeasibleRegime("a cluster needs at least one bubble".into()));
        }
        for b in &bubbles {
            b.validate()?;
        }
        let a = bubbles.iter().map(|b| b.diameter()).fold(0.0, f64::max);
        let d = min_surface_distance(&bubbles);
        if d <= 0.0 {
            return Err(Error::InfeasibleRegime(format!(
                "bubbles overlap (minimum surface distance {d:.3e})"
            )));
        }
        let m = bubbles.len();
        Ok(Cluster {
            bubbles,
            realized_stats: RealizedStats { m, a, d },
            subcube_side: 1.0,
            spec: ClusterSpec::new(a, 0.0, 0.0, 0),
        })
    }

    /// Same cluster translated by `v`.
    pub fn translated(&self, v: Vec3) -> Cluster {
        let mut c = self.clone();
        for b in &mut c.bubbles {
            b.center += v;
        }
        c
    }

    pub fn export(&self) -> ClusterExport {
        ClusterExport {
            a: self.spec.a,
            s: self.spec.s,
            t: self.spec.t,
            seed: self.spec.seed,
            bubbles: self
                .bubbles
                .iter()
                .map(|b| {
                    let (kind, params) = match &b.kind {
                        ShapeKind::Sphere { radius } => (
                            "sphere",
                            serde_json::json!({ "radius": radius * b.scale }),
                        ),
                        ShapeKind::Ellipsoid { semi_axes } => (
                            "ellipsoid",
                            serde_json::json!({ "semiAxes": semi_axes.map(|s| s * b.scale) }),
                        ),
                        ShapeKind::Mesh(m) => (
                            "mesh",
                            serde_json::json!({
                                "scale": b.scale,
                                "vertexCount": m.vertices.len(),
                                "triangleCount": m.triangles.len(),
                            }),
                        ),
                    };
                    BubbleExport {
                        kind: kind.to_string(),
                        center: b.center,
                        params,
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleExport {
    pub kind: String,
    pub center: Vec3,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterExport {
    pub a: f64,
    pub s: f64,
    pub t: f64,
    pub seed: u64,
    pub bubbles: Vec<BubbleExport>,
}

fn min_surface_distance(bubbles: &[BubbleShape]) -> f64 {
    let mut d = f64::INFINITY;
    for (i, b) in bubbles.iter().enumerate() {
        for c in &bubbles[i + 1..] {
            d = d.min(surface_distance(b, c));
        }
    }
    d
}

/// Generates a cluster following the subcube construction: the box is tiled
/// by cubes of side about `a/2 + d^alpha`, each receiving bubbles according to
/// the occupancy rule.
pub fn generate_cluster(spec: &ClusterSpec) -> Result<Cluster> {
    spec.check_regime()?;
    let kind = spec.shape.reference_kind()?;
    let template = BubbleShape {
        kind,
        center: Vec3::ZERO,
        scale: spec.a,
    };
    template.validate()?;
    if !template.satisfies_sandwich(spec.a, spec.zeta_min) {
        return Err(Error::InfeasibleRegime(format!(
            "shape violates the sandwich condition with zeta = {}",
            spec.zeta_min
        )));
    }
    let radius = template.circumradius();
    let dt = spec.a.powf(spec.t);
    let d_lo = spec.d_min_factor * dt;
    let d_hi = spec.d_max_factor * dt;

    if let Some(centers) = &spec.centers {
        let bubbles: Vec<BubbleShape> = centers
            .iter()
            .map(|c| template.translated(*c))
            .collect();
        let mut cluster = Cluster::from_bubbles(bubbles)?;
        cluster.realized_stats.a = spec.a;
        cluster.spec = spec.clone();
        return Ok(cluster);
    }

    let alpha = spec.alpha();
    let side_target = 0.5 * spec.a + dt.powf(alpha);
    let len = spec.domain_box.lengths();
    let n_axis = [len.x, len.y, len.z].map(|l| ((l / side_target).floor() as usize).max(1));
    let side = Vec3::new(
        len.x / n_axis[0] as f64,
        len.y / n_axis[1] as f64,
        len.z / n_axis[2] as f64,
    );
    let min_side = side.x.min(side.y).min(side.z);
    if min_side < 2.0 * radius {
        return Err(Error::InfeasibleRegime(format!(
            "subcube side {min_side:.3e} cannot hold a bubble of diameter {:.3e}",
            2.0 * radius
        )));
    }
    if let (Placement::Centered, Occupancy::Fixed(n)) = (spec.placement, spec.occupancy) {
        if n > 1 {
            return Err(Error::invalid(
                "geometry",
                "centered placement supports at most one bubble per subcube",
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m_cap = spec.m_max * spec.a.powf(-spec.s);
    let mut last_d = f64::NAN;
    for _attempt in 0..MAX_ATTEMPTS {
        let mut centers: Vec<Vec3> = Vec::new();
        for ix in 0..n_axis[0] {
            for iy in 0..n_axis[1] {
                for iz in 0..n_axis[2] {
                    let lo = spec.domain_box.min
                        + Vec3::new(
                            ix as f64 * side.x,
                            iy as f64 * side.y,
                            iz as f64 * side.z,
                        );
                    let count = match spec.occupancy {
                        Occupancy::Fixed(n) => n as usize,
                        Occupancy::Bernoulli(p) => usize::from(rng.random::<f64>() < p),
                    };
                    for _ in 0..count {
                        let c = match spec.placement {
                            Placement::Centered => lo + side * 0.5,
                            Placement::Jitter => {
                                place_jittered(&mut rng, lo, side, radius, d_lo, &centers)?
                            }
                        };
                        centers.push(c);
                    }
                }
            }
        }
        let m = centers.len();
        if m == 0 {
            return Err(Error::InfeasibleRegime(
                "occupancy rule produced an empty cluster".into(),
            ));
        }
        if m as f64 > m_cap * (1.0 + 1e-12) {
            return Err(Error::InfeasibleRegime(format!(
                "M = {m} exceeds M_max a^-s = {m_cap:.3}"
            )));
        }
        let bubbles: Vec<BubbleShape> = centers.iter().map(|c| template.translated(*c)).collect();
        let d = min_surface_distance(&bubbles);
        last_d = d;
        if m >= 2 && d < d_lo * (1.0 - 1e-12) {
            return Err(Error::InfeasibleRegime(format!(
                "minimum distance {d:.4e} below d_min a^t = {d_lo:.4e}"
            )));
        }
        if m >= 2 && d > d_hi {
            if spec.placement == Placement::Centered {
                break;
            }
            continue;
        }
        return Ok(Cluster {
            bubbles,
            realized_stats: RealizedStats { m, a: spec.a, d },
            subcube_side: min_side,
            spec: spec.clone(),
        });
    }
    Err(Error::InfeasibleRegime(format!(
        "realized minimum distance {last_d:.4e} exceeds d_max a^t = {d_hi:.4e}"
    )))
}

fn place_jittered(
    rng: &mut ChaCha8Rng,
    lo: Vec3,
    side: Vec3,
    radius: f64,
    d_lo: f64,
    placed: &[Vec3],
) -> Result<Vec3> {
    let span = side - Vec3::new(2.0 * radius, 2.0 * radius, 2.0 * radius);
    let base = lo + Vec3::new(radius, radius, radius);
    let reach = (2.0 * radius + d_lo) * (1.0 - 1e-12);
    for _ in 0..MAX_REJECTIONS {
        let c = base
            + Vec3::new(
                span.x * rng.random::<f64>(),
                span.y * rng.random::<f64>(),
                span.z * rng.random::<f64>(),
            );
        if placed.iter().rev().all(|p| p.dist(c) >= reach) {
            return Ok(c);
        }
    }
    Err(Error::InfeasibleRegime(format!(
        "could not place a bubble with minimum distance {d_lo:.3e} after {MAX_REJECTIONS} rejections"
    )))
}

/// `sum_{i != j} |z_i - z_j|^{-k}` by a direct loop.
pub fn distance_sum(cluster: &Cluster, j: usize, k: f64) -> Result<f64> {
    let m = cluster.len();
    if m < 2 || j >= m || !(k >= 0.0) {
        return Err(Error::invalid(
            "geometry",
            format!("distance_sum needs M >= 2, j < M and k >= 0 (M = {m}, j = {j}, k = {k})"),
        ));
    }
    let zj = cluster.bubbles[j].center;
    let terms: Vec<f64> = cluster
        .bubbles
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, b)| b.center.dist(zj).powf(-k))
        .collect();
    Ok(pairwise_sum(&terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterStats {
    #[serde(rename = "M")]
    pub m: usize,
    pub a: f64,
    pub d: f64,
    /// `|z_bar - z|` per bubble, `z_bar` the surface-measure mean.
    pub centroid_offsets: Vec<f64>,
}

/// Recomputes count, maximal diameter, minimal surface distance and the
/// centroid offsets.
pub fn cluster_stats(cluster: &Cluster) -> Result<ClusterStats> {
    let a = cluster
        .bubbles
        .iter()
        .map(|b| b.diameter())
        .fold(0.0, f64::max);
    let d = min_surface_distance(&cluster.bubbles);
    let centroid_offsets = cluster
        .bubbles
        .iter()
        .map(|b| {
            let q = crate::boundary_ops::build_quadrature(b, 2)?;
            Ok(q.surface_centroid().dist(b.center))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ClusterStats {
        m: cluster.len(),
        a,
        d,
        centroid_offsets,
    })
}
