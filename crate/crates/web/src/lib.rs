//! WebAssembly bindings for the browser demo. Each export takes a run
//! configuration as JSON text and returns a JSON document for plotting.

use bubbles_core::fields::far_field;
use bubbles_core::harness::{self, RunConfig};
use bubbles_core::oracle::oracle_far_field;
use bubbles_core::Vec3;
use serde::Serialize;
use std::f64::consts::PI;
use wasm_bindgen::prelude::*;

/// Far-field magnitudes on a great circle through the incident direction.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cut {
    /// Angle from the incident direction, radians.
    pub angles: Vec<f64>,
    pub abs_u: Vec<f64>,
    pub cross_section: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub omega: f64,
    pub common_omega_m: Option<f64>,
    pub centers: Vec<Vec3>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Sweep {
    pub omega: Vec<f64>,
    pub cross_section: Vec<Option<f64>>,
    pub re_c_inv: Vec<f64>,
    pub summary: harness::sweep::SweepSummary,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    pub source: String,
    pub angles: Vec<f64>,
    pub foldy_lax: Vec<f64>,
    pub oracle: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub foldy_lax_cross_section: f64,
    pub oracle_cross_section: f64,
}

/// `samples` directions `cos(psi) theta + sin(psi) p`, `psi` in `[0, 2 pi)`.
pub fn great_circle(theta: Vec3, samples: usize) -> (Vec<f64>, Vec<Vec3>) {
    let axis = [Vec3::E1, Vec3::E2, Vec3::E3]
        .into_iter()
        .min_by(|a, b| a.dot(theta).abs().total_cmp(&b.dot(theta).abs()))
        .unwrap();
    let p = (axis - theta * axis.dot(theta)).normalized();
    let angles: Vec<f64> = (0..samples).map(|k| 2.0 * PI * k as f64 / samples as f64).collect();
    let dirs = angles.iter().map(|&s| (theta * s.cos() + p * s.sin()).normalized()).collect();
    (angles, dirs)
}

fn parse(config: &str) -> Result<RunConfig, String> {
    RunConfig::from_json(config).map_err(|e| e.to_string())
}

fn check_samples(samples: usize) -> Result<(), String> {
    if (8..=4096).contains(&samples) {
        Ok(())
    } else {
        Err(format!("samples must lie in 8..=4096, got {samples}"))
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn far_field_cut_data(config: &str, samples: usize) -> Result<Cut, String> {
    check_samples(samples)?;
    let cfg = parse(config)?;
    let (p, sys, diag) = harness::run(&cfg, "farfield").map_err(|e| e.to_string())?;
    let (angles, dirs) = great_circle(cfg.incident_direction, samples);
    let pattern = far_field(&sys, &dirs, p.omega()).map_err(|e| e.to_string())?;
    Ok(Cut {
        angles,
        abs_u: pattern.values.iter().map(|u| u.norm()).collect(),
        cross_section: pattern.cross_section,
        m: diag.m,
        omega: diag.omega,
        common_omega_m: diag.common_omega_m,
        centers: sys.centers.clone(),
    })
}

pub fn resonance_sweep_data(config: &str) -> Result<Sweep, String> {
    let cfg = parse(config)?;
    let rep = harness::resonance_sweep(&cfg).map_err(|e| e.to_string())?;
    Ok(Sweep {
        omega: rep.rows.iter().map(|r| r.omega).collect(),
        cross_section: rep.rows.iter().map(|r| Some(r.cross_section).filter(|c| c.is_finite())).collect(),
        re_c_inv: rep.rows.iter().map(|r| r.c_inv.re).collect(),
        summary: rep.summary,
    })
}

pub fn compare_with_oracle_data(config: &str, samples: usize) -> Result<Comparison, String> {
    check_samples(samples)?;
    let cfg = parse(config)?;
    let (p, sys, _) = harness::run(&cfg, "oracle").map_err(|e| e.to_string())?;
    let (angles, dirs) = great_circle(cfg.incident_direction, samples);
    let fl = far_field(&sys, &dirs, p.omega()).map_err(|e| e.to_string())?;
    let sol = harness::oracle_solution(&cfg, &p, None).map_err(|e| e.to_string())?;
    let reference = oracle_far_field(&sol, &dirs, p.omega());
    let (abs_error, rel_error) = harness::pattern_errors(&fl, &reference);
    Ok(Comparison {
        source: reference.source.clone(),
        angles,
        foldy_lax: fl.values.iter().map(|u| u.norm()).collect(),
        oracle: reference.values.iter().map(|u| u.norm()).collect(),
        abs_error,
        rel_error,
        foldy_lax_cross_section: fl.cross_section,
        oracle_cross_section: reference.cross_section,
    })
}

/// `|u^inf|` on a great circle through the incident direction.
#[wasm_bindgen(js_name = farFieldCut)]
pub fn far_field_cut(config: &str, samples: usize) -> Result<String, String> {
    to_json(&far_field_cut_data(config, samples)?)
}

/// Scattering cross section and `Re 1/C` over the configured sweep.
#[wasm_bindgen(js_name = resonanceSweep)]
pub fn resonance_sweep(config: &str) -> Result<String, String> {
    to_json(&resonance_sweep_data(config)?)
}

/// Point-interaction pattern against the partial-wave or boundary-integral
/// reference on the same great circle.
#[wasm_bindgen(js_name = compareWithOracle)]
pub fn compare_with_oracle(config: &str, samples: usize) -> Result<String, String> {
    to_json(&compare_with_oracle_data(config, samples)?)
}
