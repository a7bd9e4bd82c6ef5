//! Convergence of the point-interaction far field towards an oracle as the
//! bubble size shrinks.

use super::config::{check_a_values, FrequencyMode, OracleKind, RunConfig};
use super::{coefficients, directions, oracle_solution, pattern_errors, prepare, solve_point};
use crate::error::Result;
use crate::fields::far_field;
use crate::numerics::log_log_slope;
use crate::oracle::oracle_far_field;
use crate::physics::CoefficientVariant;
use serde::Serialize;

/// Slack between fitted and predicted slopes.
pub const SLOPE_TOLERANCE: f64 = 0.3;
/// Exponents closer than this make a single fitted slope ambiguous.
pub const AMBIGUITY_GAP: f64 = 0.25;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StudyPoint {
    pub a: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub omega: f64,
    /// Root mean square of `|u_FL - u_oracle|` over the direction grid.
    pub error: f64,
    /// Same difference relative to the oracle pattern's L2 norm.
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceStudy {
    pub a_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub rel_errors: Vec<f64>,
    pub points: Vec<StudyPoint>,
    pub fitted_slope: f64,
    pub predicted_exponents: [f64; 2],
    pub predicted_slope: f64,
    pub ambiguous: bool,
    #[serde(rename = "slopeOK")]
    pub slope_ok: bool,
    pub oracle: OracleKind,
    pub variant: CoefficientVariant,
}

impl ConvergenceStudy {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("a,M,omega,error,relError\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{},{},{}", p.a, p.m, p.omega, p.error, p.rel_error);
        }
        s
    }
}

/// The two remainder exponents of the far-field expansion for this
/// configuration.
pub fn predicted_exponents(cfg: &RunConfig) -> [f64; 2] {
    let (s, t) = (cfg.cluster.s, cfg.cluster.t);
    let g = cfg.contrast.gamma();
    match cfg.frequency {
        FrequencyMode::RelativeToResonance(r) => {
            let first = if cfg.coefficient_variant == CoefficientVariant::Refined {
                2.0 - s - r.h1
            } else {
                2.0 - s - 2.0 * r.h1
            };
            [first, 3.0 - 2.0 * t - 2.0 * s - 2.0 * r.h1]
        }
        _ => [2.0 - s, 3.0 - g - s - 2.0 * t],
    }
}

/// Error of the point-interaction far field against the oracle at size `a`.
pub fn study_point(cfg: &RunConfig, a: f64, oracle: OracleKind) -> Result<StudyPoint> {
    let mut c = cfg.clone();
    c.cluster.a = a;
    let p = prepare(&c)?;
    let coeffs = coefficients(&p, c.coefficient_variant)?;
    let sys = solve_point(&c, &p, &coeffs)?;
    let dirs = directions(&c);
    let fl = far_field(&sys, &dirs, p.omega())?;
    let sol = oracle_solution(&c, &p, Some(oracle))?;
    let reference = oracle_far_field(&sol, &dirs, p.omega());
    let (error, rel_error) = pattern_errors(&fl, &reference);
    Ok(StudyPoint {
        a,
        m: p.cluster.len(),
        omega: p.omega(),
        error,
        rel_error,
    })
}

pub fn convergence_study(cfg: &RunConfig, a_values: &[f64], oracle: OracleKind) -> Result<ConvergenceStudy> {
    check_a_values(a_values)?;
    let points = crate::parallel::map_indices(a_values.len(), |i| study_point(cfg, a_values[i], oracle))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = points.iter().map(|p| p.error).collect();
    let fitted_slope = log_log_slope(a_values, &errors);
    let predicted_exponents = predicted_exponents(cfg);
    let predicted_slope = predicted_exponents[0].min(predicted_exponents[1]);
    Ok(ConvergenceStudy {
        a_values: a_values.to_vec(),
        rel_errors: points.iter().map(|p| p.rel_error).collect(),
        errors,
        points,
        fitted_slope,
        predicted_exponents,
        predicted_slope,
        ambiguous: (predicted_exponents[0] - predicted_exponents[1]).abs() < AMBIGUITY_GAP,
        slope_ok: fitted_slope >= predicted_slope - SLOPE_TOLERANCE,
        oracle,
        variant: cfg.coefficient_variant,
    })
}
