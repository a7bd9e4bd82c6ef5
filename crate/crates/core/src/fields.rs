//! Incident, scattered and far fields of the point-interaction model.
//!
//! The far-field pattern is `u^inf(x) = sum_m e^{-i k0 x.z_m} Q_m`, i.e. the
//! coefficient of `e^{i k0 |x|} / (4 pi |x|)` in the scattered field.

use crate::error::{Error, Result};
use crate::foldy_lax::FoldyLaxSystem;
use crate::numerics::{pairwise_sum, pairwise_sum_c, SphereProductRule, Vec3, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

/// Quadrature used for the total cross-section: Gauss-Legendre in `cos(theta)`
/// times the trapezoidal rule in `phi`.
pub const CROSS_SECTION_RULE: (usize, usize) = (50, 100);

/// `u^I(x) = e^{i k0 theta.x}`
pub fn incident_field(kappa0: f64, theta: Vec3, x: Vec3) -> C64 {
    C64::new(0.0, kappa0 * theta.dot(x)).exp()
}

/// `u^s(x) = sum_m Phi_k0(x, z_m) Q_m`, valid at distance `> a` from every
/// center.
pub fn scattered_near_field(solution: &FoldyLaxSystem, a: f64, x: Vec3) -> Result<C64> {
    check_solved(solution)?;
    let k = C64::new(0.0, solution.kappa0);
    let mut terms = Vec::with_capacity(solution.len());
    for (m, (z, q)) in solution.centers.iter().zip(&solution.q).enumerate() {
        let r = x.dist(*z);
        if r <= a {
            return Err(Error::PointInsideExclusionZone { bubble: m });
        }
        terms.push((k * r).exp() / (4.0 * PI * r) * q);
    }
    Ok(pairwise_sum_c(&terms))
}

fn check_solved(solution: &FoldyLaxSystem) -> Result<()> {
    if !solution.solved {
        return Err(Error::invalid("fields", "the system has not been solved"));
    }
    Ok(())
}

/// Far-field pattern for one set of monopole strengths.
pub fn far_field_values(kappa0: f64, centers: &[Vec3], q: &[C64], dirs: &[Vec3]) -> Vec<C64> {
    crate::parallel::map_indices(dirs.len(), |j| {
        let terms: Vec<C64> = centers
            .iter()
            .zip(q)
            .map(|(z, qm)| C64::new(0.0, -kappa0 * dirs[j].dot(*z)).exp() * qm)
            .collect();
        pairwise_sum_c(&terms)
    })
}

/// `int_{S^2} |u^inf|^2 dx` over the fixed product rule.
pub fn cross_section<F>(pattern: F) -> f64
where
    F: Fn(&[Vec3]) -> Vec<C64>,
{
    let rule = SphereProductRule::new(CROSS_SECTION_RULE.0, CROSS_SECTION_RULE.1);
    let vals = pattern(&rule.directions);
    let terms: Vec<f64> = vals.iter().zip(&rule.weights).map(|(v, w)| v.norm_sqr() * w).collect();
    pairwise_sum(&terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FarFieldPattern {
    pub directions: Vec<Vec3>,
    pub theta: Vec3,
    pub values: Vec<C64>,
    pub cross_section: f64,
    pub omega: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FarFieldSummary {
    pub cross_section: f64,
    pub theta_dir: Vec3,
    pub omega: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub source: String,
}

/// Source tag of Foldy-Lax patterns.
pub const SOURCE_FOLDY_LAX: &str = "foldyLax";

pub fn far_field(solution: &FoldyLaxSystem, directions: &[Vec3], omega: f64) -> Result<FarFieldPattern> {
    check_solved(solution)?;
    if let Some(d) = directions.iter().find(|d| (d.norm() - 1.0).abs() > 1e-10) {
        return Err(Error::invalid("fields", format!("direction {d:?} is not a unit vector")));
    }
    let k0 = solution.kappa0;
    let values = far_field_values(k0, &solution.centers, &solution.q, directions);
    let cross = cross_section(|d| far_field_values(k0, &solution.centers, &solution.q, d));
    Ok(FarFieldPattern {
        directions: directions.to_vec(),
        theta: solution.theta,
        values,
        cross_section: cross,
        omega,
        m: solution.len(),
        source: SOURCE_FOLDY_LAX.into(),
    })
}

impl FarFieldPattern {
    pub fn summary(&self) -> FarFieldSummary {
        FarFieldSummary {
            cross_section: self.cross_section,
            theta_dir: self.theta,
            omega: self.omega,
            m: self.m,
            source: self.source.clone(),
        }
    }

    /// `dirX,dirY,dirZ,reU,imU,absU` with shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dirX,dirY,dirZ,reU,imU,absU\n");
        for (d, u) in self.directions.iter().zip(&self.values) {
            let _ = writeln!(s, "{},{},{},{},{},{}", d.x, d.y, d.z, u.re, u.im, u.norm());
        }
        s
    }

    /// Writes `farfield.csv` and `farfield.json` into `dir`.
    pub fn write<P: AsRef<Path>>(&self, dir: P) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("farfield.csv"), self.to_csv())?;
        let json = serde_json::to_string_pretty(&self.summary()).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(dir.join("farfield.json"), json + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foldy_lax::{assemble, solve};
    use crate::geometry::{BubbleShape, Cluster};
    use crate::physics::{CoefficientVariant, Material, MediumSpec, ScatterCoefficient};

    fn solved(centers: &[Vec3], theta: Vec3) -> FoldyLaxSystem {
        let c = Cluster::from_bubbles(centers.iter().map(|z| BubbleShape::sphere(*z, 0.01)).collect()).unwrap();
        let med = MediumSpec::uniform(1000.0, 2.25e9, Material { rho_b: 1.0, k_b: 2.25e6 }, centers.len(), 9000.0);
        let co: Vec<ScatterCoefficient> = (0..centers.len())
            .map(|_| {
                let ci = C64::new(-40.0, 0.5);
                ScatterCoefficient {
                    c: 1.0 / ci,
                    c_inv: ci,
                    variant: CoefficientVariant::Leading,
                }
            })
            .collect();
        solve(assemble(&c, &co, &med, theta).unwrap()).unwrap()
    }

    #[test]
    fn near_field_far_field_consistency() {
        let s = solved(&[Vec3::ZERO, Vec3::new(0.2, 0.1, 0.0), Vec3::new(-0.1, 0.3, 0.2)], Vec3::E3);
        let xh = Vec3::new(1.0, 2.0, 2.0).normalized();
        let r = 1e6;
        let us = scattered_near_field(&s, 0.01, xh * r).unwrap();
        let k = s.kappa0;
        let approx = C64::new(0.0, k * r).exp() / (4.0 * PI * r) * far_field_values(k, &s.centers, &s.q, &[xh])[0];
        assert!((us - approx).norm() < 1e-5 * approx.norm());
    }

    #[test]
    fn exclusion_zone_is_enforced() {
        let s = solved(&[Vec3::ZERO, Vec3::E1 * 0.3], Vec3::E3);
        let e = scattered_near_field(&s, 0.01, Vec3::E1 * 0.305).unwrap_err();
        assert!(matches!(e, Error::PointInsideExclusionZone { bubble: 1 }));
    }

    #[test]
    fn csv_layout() {
        let s = solved(&[Vec3::ZERO], Vec3::E3);
        let p = far_field(&s, &[Vec3::E1, Vec3::E2], 9000.0).unwrap();
        let csv = p.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "dirX,dirY,dirZ,reU,imU,absU");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 6);
        // one isotropic scatterer: |u|^2 integrates to 4 pi |Q|^2
        let expect = 4.0 * PI * s.q[0].norm_sqr();
        assert!((p.cross_section - expect).abs() < 1e-12 * expect);
    }
}
