//! Collocation solver for the transmission problem on a few spheres.
//!
//! Outside, `u^s = sum_j S^{k0}_j phi_j`; inside bubble `i`,
//! `u = S^{k_i}_i psi_i`. On each surface
//!
//! ```text
//! S^{k_i} psi_i - sum_j S^{k0}_{ij} phi_j                        = u^I
//! (1/rho_i)(1/2 + K*_{k_i}) psi_i
//!     - (1/rho_0)[(-1/2 + K*_{k0}) phi_i + sum_{j!=i} dS_{ij} phi_j] = (1/rho_0) du^I/dnu
//! ```
//!
//! Self blocks are the spectral sphere operators; cross blocks apply the
//! smooth kernels at the quadrature nodes.

use crate::boundary_ops::{assemble_layer, build_quadrature, LayerKind, SurfaceQuadrature};
use crate::error::{Error, Result};
use crate::geometry::{Cluster, ShapeKind};
use crate::linalg::{self, Matrix};
use crate::numerics::{pairwise_sum_c, Vec3, C64};
use crate::physics::MediumSpec;
use serde::Serialize;
use std::f64::consts::PI;

/// Largest cluster the solver accepts.
pub const MAX_BUBBLES: usize = 5;
/// Default resolution order.
pub const DEFAULT_ORDER: usize = 2;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BubbleDensities {
    pub phi: Vec<C64>,
    pub psi: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct BemSolution {
    pub densities: Vec<BubbleDensities>,
    pub residual: f64,
    pub condition: f64,
    pub kappa0: f64,
    pub theta: Vec3,
    pub order: usize,
    nodes: Vec<Vec<Vec3>>,
    weights: Vec<Vec<f64>>,
}

fn phi_kernel(k: f64, x: Vec3, y: Vec3) -> C64 {
    let r = x.dist(y);
    C64::new(0.0, k * r).exp() / (4.0 * PI * r)
}

fn dphi_kernel(k: f64, x: Vec3, nx: Vec3, y: Vec3) -> C64 {
    let d = x - y;
    let r = d.norm();
    C64::new(0.0, k * r).exp() * C64::new(-1.0, k * r) * (d.dot(nx) / (4.0 * PI * r * r * r))
}

pub fn bem_solve(cluster: &Cluster, medium: &MediumSpec, theta: Vec3, order: usize) -> Result<BemSolution> {
    let m = cluster.len();
    if m == 0 || m > MAX_BUBBLES {
        return Err(Error::OracleInfeasible(format!(
            "the boundary integral oracle handles 1 to {MAX_BUBBLES} bubbles, got {m}"
        )));
    }
    if medium.per_bubble.len() != m {
        return Err(Error::invalid("oracle", "one material per bubble is required"));
    }
    let mut radii = Vec::with_capacity(m);
    for b in &cluster.bubbles {
        match b.kind {
            ShapeKind::Sphere { radius } => radii.push(radius * b.scale),
            _ => return Err(Error::OracleInfeasible("the boundary integral oracle needs spheres".into())),
        }
    }
    let diam = 2.0 * radii.iter().cloned().fold(0.0, f64::max);
    for i in 0..m {
        for j in i + 1..m {
            let d = cluster.bubbles[i].center.dist(cluster.bubbles[j].center);
            if d <= 3.0 * diam {
                return Err(Error::invalid(
                    "oracle",
                    format!("bubbles {i} and {j} are {d:.3e} apart, need more than {:.3e}", 3.0 * diam),
                ));
            }
        }
    }
    if order == 0 {
        return Err(Error::ResolutionInsufficient("order must be at least 1".into()));
    }
    let k0 = medium.kappa0();
    let quads: Vec<SurfaceQuadrature> = cluster
        .bubbles
        .iter()
        .map(|b| build_quadrature(b, order))
        .collect::<Result<_>>()?;
    let lmax = quads[0].band_limit().unwrap_or(0) as f64;
    for (i, r) in radii.iter().enumerate() {
        let kr = k0.max(medium.kappa(i)) * r;
        if kr > lmax / 4.0 {
            return Err(Error::ResolutionInsufficient(format!(
                "kappa r = {kr:.3} on bubble {i} needs a band limit above {}",
                (4.0 * kr).ceil()
            )));
        }
    }
    let n = quads[0].len();
    let zero = C64::new(0.0, 0.0);
    let half = C64::new(0.5, 0.0);
    let mut self_blocks = Vec::with_capacity(m);
    for (i, q) in quads.iter().enumerate() {
        let kb = C64::new(medium.kappa(i), 0.0);
        let kc = C64::new(k0, 0.0);
        let sb = assemble_layer(q, LayerKind::SingleLayer, kb).matrix;
        let kstar_b = assemble_layer(q, LayerKind::AdjointDoubleLayer, kb).matrix;
        let s0 = assemble_layer(q, LayerKind::SingleLayer, kc).matrix;
        let kstar_0 = assemble_layer(q, LayerKind::AdjointDoubleLayer, kc).matrix;
        self_blocks.push([sb, kstar_b, s0, kstar_0]);
    }
    let rho0 = medium.rho0;
    let dim = 2 * n * m;
    let a = Matrix::from_fn(dim, dim, |row, col| {
        let (bi, ri) = (row / (2 * n), row % (2 * n));
        let (bj, cj) = (col / (2 * n), col % (2 * n));
        let (second_eq, x) = (ri >= n, ri % n);
        let (is_psi, y) = (cj >= n, cj % n);
        let rho_b = medium.per_bubble[bi].rho_b;
        let blocks = &self_blocks[bi];
        let diag = if x == y { C64::new(1.0, 0.0) } else { zero };
        match (second_eq, is_psi, bi == bj) {
            (false, true, true) => blocks[0][(x, y)],
            (false, true, false) | (true, true, false) => zero,
            (false, false, true) => -blocks[2][(x, y)],
            (false, false, false) => -phi_kernel(k0, quads[bi].nodes[x], quads[bj].nodes[y]) * quads[bj].weights[y],
            (true, true, true) => (half * diag + blocks[1][(x, y)]) / rho_b,
            (true, false, true) => -(blocks[3][(x, y)] - half * diag) / rho0,
            (true, false, false) => {
                -dphi_kernel(k0, quads[bi].nodes[x], quads[bi].normals[x], quads[bj].nodes[y])
                    * (quads[bj].weights[y] / rho0)
            }
        }
    });
    let mut rhs = Vec::with_capacity(dim);
    for q in &quads {
        let ui: Vec<C64> = q.nodes.iter().map(|x| C64::new(0.0, k0 * theta.dot(*x)).exp()).collect();
        rhs.extend_from_slice(&ui);
        rhs.extend(ui.iter().zip(&q.normals).map(|(u, nu)| u * C64::new(0.0, k0 * theta.dot(*nu) / rho0)));
    }
    let sol = linalg::dense_solve(&a, &rhs, "oracle")?;
    if sol.residual > 1e-8 {
        return Err(Error::singular(
            "oracle",
            sol.condition,
            format!("jump system residual {:.3e} exceeds 1e-8", sol.residual),
        ));
    }
    let densities = (0..m)
        .map(|i| BubbleDensities {
            phi: sol.x[2 * n * i..2 * n * i + n].to_vec(),
            psi: sol.x[2 * n * i + n..2 * n * (i + 1)].to_vec(),
        })
        .collect();
    Ok(BemSolution {
        densities,
        residual: sol.residual,
        condition: sol.condition,
        kappa0: k0,
        theta,
        order,
        nodes: quads.iter().map(|q| q.nodes.clone()).collect(),
        weights: quads.iter().map(|q| q.weights.clone()).collect(),
    })
}

impl BemSolution {
    /// `u^inf(x) = sum_j int e^{-i k0 x.y} phi_j(y) dsigma_y`
    pub fn far_field_values(&self, dirs: &[Vec3]) -> Vec<C64> {
        let k = self.kappa0;
        crate::parallel::map_indices(dirs.len(), |d| {
            let terms: Vec<C64> = self
                .densities
                .iter()
                .zip(self.nodes.iter().zip(&self.weights))
                .flat_map(|(dens, (nodes, weights))| {
                    dens.phi
                        .iter()
                        .zip(nodes.iter().zip(weights))
                        .map(move |(p, (y, w))| C64::new(0.0, -k * dirs[d].dot(*y)).exp() * p * *w)
                })
                .collect();
            pairwise_sum_c(&terms)
        })
    }
}
