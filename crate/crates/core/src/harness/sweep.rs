//! Frequency sweeps across the Minnaert resonance.

use super::config::{FrequencyMode, RunConfig};
use super::{coefficients, prepare_geometry, solve_point, with_frequency};
use crate::error::{Error, Result};
use crate::fields::{cross_section, far_field_values};
use crate::physics::dominating_inverse_coefficient;
use crate::numerics::C64;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub omega: f64,
    pub cross_section: f64,
    /// `C^{-1}` of the first bubble for the configured variant.
    pub c_inv: C64,
    /// Dominating near-resonance form of `C^{-1}` at the same frequency.
    pub dominating_c_inv: Option<C64>,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignChange {
    pub omega_lo: f64,
    pub omega_hi: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSummary {
    #[serde(rename = "M")]
    pub m: usize,
    pub common_omega_m: Option<f64>,
    pub bin_width: f64,
    pub sign_changes: Vec<SignChange>,
    pub argmax_cross_section: Option<f64>,
    /// Whether the cross-section peak lies within one bin of `omega_M`.
    pub peak_within_one_bin: Option<bool>,
    pub failed_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("omega,crossSection,reCinv,imCinv,status,dominatingReCinv,dominatingImCinv\n");
        for r in &self.rows {
            let (dre, dim) = match r.dominating_c_inv {
                Some(d) => (d.re.to_string(), d.im.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{dre},{dim}",
                r.omega, r.cross_section, r.c_inv.re, r.c_inv.im, r.status
            );
        }
        s
    }
}

fn status_of(e: &Error) -> String {
    match e {
        Error::AtResonance { .. } => "atResonance".into(),
        Error::Singular { .. } => "singular".into(),
        Error::DivisionDegenerate(_) => "degenerate".into(),
        _ => "error".into(),
    }
}

pub fn resonance_sweep(cfg: &RunConfig) -> Result<SweepReport> {
    let sweep = match &cfg.frequency {
        FrequencyMode::Sweep(s) => *s,
        _ => return Err(Error::Config("the sweep command needs frequency.sweep".into())),
    };
    let grid = sweep.grid()?;
    let base = prepare_geometry(cfg)?;
    let rows: Vec<SweepRow> = crate::parallel::map_indices(grid.len(), |i| {
        let omega = grid[i];
        let nan = C64::new(f64::NAN, f64::NAN);
        let p = match with_frequency(cfg, base.clone(), Some(omega)) {
            Ok(p) => p,
            Err(e) => {
                return SweepRow {
                    omega,
                    cross_section: f64::NAN,
                    c_inv: nan,
                    dominating_c_inv: None,
                    status: status_of(&e),
                }
            }
        };
        let dominating_c_inv = p.common_omega_m.and_then(|wm| {
            let x = 1.0 - (wm / omega).powi(2);
            dominating_inverse_coefficient(&p.functionals[0], &p.medium, 0, p.a(), x, 0.0)
                .ok()
                .map(|c| c.c_inv)
        });
        let variant = cfg.coefficient_variant;
        let result = coefficients(&p, variant).and_then(|co| {
            let sys = solve_point(cfg, &p, &co)?;
            let k0 = sys.kappa0;
            let cs = cross_section(|d| far_field_values(k0, &sys.centers, &sys.q, d));
            Ok((co[0].c_inv, cs))
        });
        match result {
            Ok((c_inv, cs)) => SweepRow {
                omega,
                cross_section: cs,
                c_inv,
                dominating_c_inv,
                status: "ok".into(),
            },
            Err(e) => SweepRow {
                omega,
                cross_section: f64::NAN,
                c_inv: coefficients(&p, variant).map(|c| c[0].c_inv).unwrap_or(nan),
                dominating_c_inv,
                status: status_of(&e),
            },
        }
    });
    let sign_changes = rows
        .windows(2)
        .filter(|w| {
            let (a, b) = (w[0].c_inv.re, w[1].c_inv.re);
            a.is_finite() && b.is_finite() && a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0)
        })
        .map(|w| SignChange {
            omega_lo: w[0].omega,
            omega_hi: w[1].omega,
        })
        .collect();
    let argmax = rows
        .iter()
        .filter(|r| r.cross_section.is_finite())
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.cross_section >= r.cross_section => Some(b),
            _ => Some(r),
        })
        .map(|r| r.omega);
    let bin_width = grid[1] - grid[0];
    let summary = SweepSummary {
        m: base.cluster.len(),
        common_omega_m: base.common_omega_m,
        bin_width,
        sign_changes,
        argmax_cross_section: argmax,
        peak_within_one_bin: match (argmax, base.common_omega_m) {
            (Some(w), Some(wm)) => Some((w - wm).abs() <= bin_width),
            _ => None,
        },
        failed_points: rows.iter().filter(|r| r.status != "ok").count(),
    };
    Ok(SweepReport { rows, summary })
}
