//! The point-interaction system
//! `C_m^{-1} Q_m + sum_{l != m} Phi_k0(z_l, z_m) Q_l = -u^I(z_m)`
//! and the invertibility diagnostics attached to it.

use crate::error::{Error, Result};
use crate::geometry::Cluster;
use crate::linalg::{self, Matrix};
use crate::numerics::{norm2_c, pairwise_sum_c, Vec3, C64};
use crate::physics::{MediumSpec, ScatterCoefficient};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `M` solved by dense LU; larger systems use GMRES.
pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

/// `Phi_k(x, y) = e^{i k |x-y|} / (4 pi |x-y|)`
pub fn fundamental_solution(kappa: C64, x: Vec3, y: Vec3) -> Result<C64> {
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(phi(kappa, r))
}

fn phi(kappa: C64, r: f64) -> C64 {
    (C64::new(0.0, 1.0) * kappa * r).exp() / (4.0 * PI * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SolverKind {
    DenseLu,
    Gmres,
}

/// Assembled (and possibly solved) point-interaction system.
#[derive(Debug, Clone)]
pub struct FoldyLaxSystem {
    /// Dense matrix; `None` above the dense limit, where products are formed
    /// on the fly.
    pub matrix: Option<Matrix>,
    pub diagonal: Vec<C64>,
    pub rhs: Vec<C64>,
    pub q: Vec<C64>,
    pub residual_norm: f64,
    pub condition_estimate: f64,
    /// `min_{j != m} cos(kappa_0 |z_m - z_j|)`; infinite for one bubble.
    pub tau: f64,
    pub kappa0: f64,
    pub theta: Vec3,
    pub centers: Vec<Vec3>,
    pub solver: SolverKind,
    pub solved: bool,
}

impl FoldyLaxSystem {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Entry `(m, l)` of the system matrix.
    pub fn entry(&self, m: usize, l: usize) -> C64 {
        match &self.matrix {
            Some(a) => a[(m, l)],
            None if m == l => self.diagonal[m],
            None => phi(C64::new(self.kappa0, 0.0), self.centers[m].dist(self.centers[l])),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        match &self.matrix {
            Some(a) => linalg::matvec(a, x),
            None => {
                let k = C64::new(self.kappa0, 0.0);
                crate::parallel::map_indices(self.len(), |m| {
                    let terms: Vec<C64> = (0..self.len())
                        .map(|l| {
                            if l == m {
                                self.diagonal[m] * x[m]
                            } else {
                                phi(k, self.centers[m].dist(self.centers[l])) * x[l]
                            }
                        })
                        .collect();
                    pairwise_sum_c(&terms)
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    pub dense_limit: usize,
    /// Incident amplitude; 0 is a test hook giving `Q = 0`.
    pub amplitude: C64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            dense_limit: DEFAULT_DENSE_LIMIT,
            amplitude: C64::new(1.0, 0.0),
        }
    }
}

pub fn assemble(
    cluster: &Cluster,
    coefficients: &[ScatterCoefficient],
    medium: &MediumSpec,
    theta: Vec3,
) -> Result<FoldyLaxSystem> {
    assemble_with(cluster, coefficients, medium, theta, AssemblyOptions::default())
}

pub fn assemble_with(
    cluster: &Cluster,
    coefficients: &[ScatterCoefficient],
    medium: &MediumSpec,
    theta: Vec3,
    opts: AssemblyOptions,
) -> Result<FoldyLaxSystem> {
    let m = cluster.len();
    if coefficients.len() != m {
        return Err(Error::invalid(
            "foldy_lax",
            format!("{} coefficients for {m} bubbles", coefficients.len()),
        ));
    }
    if (theta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("foldy_lax", "incident direction must be a unit vector"));
    }
    let centers = cluster.centers();
    let k0 = medium.kappa0();
    let kc = C64::new(k0, 0.0);
    let diagonal: Vec<C64> = coefficients.iter().map(|c| c.c_inv).collect();
    let rhs: Vec<C64> = centers
        .iter()
        .map(|z| -opts.amplitude * C64::new(0.0, k0 * theta.dot(*z)).exp())
        .collect();
    let tau = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| (k0 * centers[i].dist(centers[j])).cos())
        .fold(f64::INFINITY, f64::min);
    let (matrix, solver) = if m <= opts.dense_limit {
        for i in 0..m {
            for j in i + 1..m {
                if centers[i] == centers[j] {
                    return Err(Error::CoincidentPoints);
                }
            }
        }
        let a = crate::parallel::matrix_from_rows(m, m, |i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        diagonal[i]
                    } else {
                        phi(kc, centers[i].dist(centers[j]))
                    }
                })
                .collect()
        });
        (Some(a), SolverKind::DenseLu)
    } else {
        (None, SolverKind::Gmres)
    };
    Ok(FoldyLaxSystem {
        matrix,
        diagonal,
        rhs,
        q: vec![],
        residual_norm: f64::NAN,
        condition_estimate: f64::NAN,
        tau,
        kappa0: k0,
        theta,
        centers,
        solver,
        solved: false,
    })
}

/// Solves the system; the residual must not exceed 1e-10.
pub fn solve(mut system: FoldyLaxSystem) -> Result<FoldyLaxSystem> {
    let sol = match &system.matrix {
        Some(a) => linalg::dense_solve(a, &system.rhs, "foldy_lax")?,
        None => linalg::gmres(|x| system.apply(x), &system.rhs, 1e-10, 500, 100, "foldy_lax")?,
    };
    if sol.residual > 1e-10 {
        return Err(Error::singular(
            "foldy_lax",
            sol.condition,
            format!("relative residual {:.3e} exceeds 1e-10", sol.residual),
        ));
    }
    system.q = sol.x;
    system.residual_norm = sol.residual;
    system.condition_estimate = sol.condition;
    system.solved = true;
    Ok(system)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Regime {
    NegativeCm,
    PositiveCmTau,
    PositiveCmSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

/// Cluster-level constants entering the invertibility inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportParams {
    pub a: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub m_max: f64,
    /// Forces the positive-coefficient sub-case; ignored for negative ones.
    pub case_hint: Option<Regime>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvertibilityReport {
    pub regime: Regime,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: Verdict,
    pub tau: f64,
    pub min_abs_re_c: f64,
    pub max_abs_c: f64,
    pub d: f64,
    #[serde(rename = "M")]
    pub m: usize,
    /// Upper bound factor `B` in `||Q|| <= B ||Y||`; absent when the
    /// inequality fails.
    pub solution_bound_factor: Option<f64>,
}

/// Evaluates both sides of the invertibility condition with the unknown
/// generic constant set to 1 and the dipole term dropped (symmetric shapes).
pub fn invertibility_report(
    cluster: &Cluster,
    coefficients: &[ScatterCoefficient],
    medium: &MediumSpec,
    params: ReportParams,
) -> Result<InvertibilityReport> {
    let m = cluster.len();
    if coefficients.len() != m {
        return Err(Error::invalid("foldy_lax", "one coefficient per bubble is required"));
    }
    let positive = coefficients.iter().filter(|c| c.c.re > 0.0).count();
    let negative = coefficients.iter().filter(|c| c.c.re < 0.0).count();
    if positive + negative < m || (positive > 0 && negative > 0) {
        return Err(Error::MixedSignCoefficients { positive, negative });
    }
    let centers = cluster.centers();
    let k0 = medium.kappa0();
    let tau = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| (k0 * centers[i].dist(centers[j])).cos())
        .fold(f64::INFINITY, f64::min);
    let regime = if negative > 0 {
        Regime::NegativeCm
    } else {
        match params.case_hint {
            Some(Regime::PositiveCmSmall) => Regime::PositiveCmSmall,
            Some(Regime::PositiveCmTau) => Regime::PositiveCmTau,
            _ if tau > 0.0 => Regime::PositiveCmTau,
            _ => Regime::PositiveCmSmall,
        }
    };
    let min_abs_re_c = coefficients.iter().map(|c| c.c.re.abs()).fold(f64::INFINITY, f64::min);
    let max_abs_c = coefficients.iter().map(|c| c.c.norm()).fold(0.0, f64::max);
    let lhs = min_abs_re_c / (max_abs_c * max_abs_c);
    let d = cluster.realized_stats.d;
    if m == 1 {
        return Ok(InvertibilityReport {
            regime,
            lhs,
            rhs: 0.0,
            satisfied: Verdict::Yes,
            tau,
            min_abs_re_c,
            max_abs_c,
            d,
            m,
            solution_bound_factor: Some(2.0 * max_abs_c / (min_abs_re_c / max_abs_c)),
        });
    }
    let (a, g, al) = (params.a, params.gamma, params.alpha);
    let mm = m as f64 * params.m_max;
    let f2 = (d.powi(-2) + d.powf(-3.0 * al)).sqrt();
    let f4 = (d.powi(-4) + d.powf(-5.0 * al)).sqrt();
    let common = a.powf(2.0 - g) * mm.sqrt() * f4 + a.powf(3.0 - g) * mm * f2 * f4;
    let rhs = match regime {
        Regime::PositiveCmTau => 3.0 * tau / (5.0 * PI * d) + common,
        _ => mm.sqrt() * f2 + common,
    };
    let satisfied = if regime == Regime::PositiveCmTau && !(tau > 0.0) {
        Verdict::No
    } else if lhs >= 10.0 * rhs {
        Verdict::Yes
    } else if lhs < rhs / 10.0 {
        Verdict::No
    } else {
        Verdict::Indeterminate
    };
    let margin = min_abs_re_c / max_abs_c - rhs * max_abs_c;
    let solution_bound_factor = (satisfied != Verdict::No && margin > 0.0).then(|| 2.0 * max_abs_c / margin);
    Ok(InvertibilityReport {
        regime,
        lhs,
        rhs,
        satisfied,
        tau,
        min_abs_re_c,
        max_abs_c,
        d,
        m,
        solution_bound_factor,
    })
}

/// `||Q||_2` bound from the report for a given right-hand side.
pub fn solution_bound(report: &InvertibilityReport, rhs: &[C64]) -> Option<f64> {
    report.solution_bound_factor.map(|b| b * norm2_c(rhs))
}
