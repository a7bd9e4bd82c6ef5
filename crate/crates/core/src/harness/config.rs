//! JSON run configuration.

use crate::error::{Error, Result};
use crate::foldy_lax::Regime;
use crate::geometry::ClusterSpec;
use crate::numerics::Vec3;
use crate::physics::{CoefficientVariant, ContrastLaw};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Background {
    pub rho0: f64,
    pub k0: f64,
}

impl Default for Background {
    /// Water at room temperature.
    fn default() -> Self {
        Background { rho0: 1000.0, k0: 2.25e9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FixedFrequency {
    pub omega: f64,
}

/// `1 - omega_M^2 / omega^2 = lM a^h1`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeFrequency {
    #[serde(rename = "lM")]
    pub l_m: f64,
    pub h1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FrequencySweep {
    pub omega_min: f64,
    pub omega_max: f64,
    pub count: usize,
}

impl FrequencySweep {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.omega_min > 0.0 && self.omega_max > self.omega_min && self.count >= 2) {
            return Err(Error::Config(format!(
                "frequency.sweep: need 0 < omegaMin < omegaMax and count >= 2 (got {}, {}, {})",
                self.omega_min, self.omega_max, self.count
            )));
        }
        let step = (self.omega_max - self.omega_min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.omega_min + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FrequencyMode {
    Fixed(FixedFrequency),
    RelativeToResonance(RelativeFrequency),
    Sweep(FrequencySweep),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OracleKind {
    Mie,
    Bem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StudyConfig {
    /// Strictly decreasing bubble sizes, at least three.
    pub a_values: Vec<f64>,
    pub oracle: OracleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OracleSettings {
    #[serde(default = "default_bem_order")]
    pub bem_order: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            bem_order: default_bem_order(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InvertibilitySettings {
    /// Selects between the two positive-coefficient estimates.
    #[serde(default)]
    pub case_hint: Option<Regime>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

fn default_bem_order() -> usize {
    crate::oracle::bem::DEFAULT_ORDER
}
fn default_directions() -> usize {
    590
}
fn default_theta() -> Vec3 {
    Vec3::E3
}
fn default_order() -> usize {
    crate::shape_functionals::DEFAULT_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub medium: Background,
    pub cluster: ClusterSpec,
    pub contrast: ContrastLaw,
    pub frequency: FrequencyMode,
    #[serde(default)]
    pub coefficient_variant: CoefficientVariant,
    #[serde(default = "default_directions")]
    pub directions_n: usize,
    #[serde(default = "default_theta")]
    pub incident_direction: Vec3,
    #[serde(default = "default_order")]
    pub functional_order: usize,
    #[serde(default)]
    pub omega_max: Option<f64>,
    #[serde(default)]
    pub dense_limit: Option<usize>,
    #[serde(default)]
    pub invertibility: InvertibilitySettings,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default)]
    pub study: Option<StudyConfig>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl RunConfig {
    /// Parses JSON; errors name the offending key path.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.as_ref().display())))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.directions_n == 0 {
            return Err(Error::Config("directionsN must be positive".into()));
        }
        if (self.incident_direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Config("incidentDirection must be a unit vector".into()));
        }
        if !(self.medium.rho0 > 0.0 && self.medium.k0 > 0.0) {
            return Err(Error::Config("medium.rho0 and medium.k0 must be positive".into()));
        }
        if let FrequencyMode::Sweep(s) = &self.frequency {
            s.grid()?;
        }
        if let Some(study) = &self.study {
            check_a_values(&study.a_values)?;
        }
        Ok(())
    }
}

pub fn check_a_values(a: &[f64]) -> Result<()> {
    if a.len() < 3 {
        return Err(Error::Config(format!("study.aValues needs at least 3 entries, got {}", a.len())));
    }
    if a.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Config("study.aValues must be positive".into()));
    }
    if a.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("study.aValues must be strictly decreasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "cluster": {"a": 0.01},
        "contrast": {"cRho": 12, "beta": 2},
        "frequency": {"fixed": {"omega": 9000}}
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(BASE).unwrap();
        assert_eq!(c.directions_n, 590);
        assert_eq!(c.medium, Background::default());
        assert_eq!(c.frequency, FrequencyMode::Fixed(FixedFrequency { omega: 9000.0 }));
    }

    #[test]
    fn unknown_key_is_named() {
        let text = BASE.replace("\"beta\": 2", "\"beta\": 2, \"betta\": 3");
        let e = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("betta") && e.contains("contrast"), "{e}");
    }

    #[test]
    fn relative_mode_parses() {
        let text = BASE.replace(r#"{"fixed": {"omega": 9000}}"#, r#"{"relativeToResonance": {"lM": -1, "h1": 0.5}}"#);
        let c = RunConfig::from_json(&text).unwrap();
        assert_eq!(c.frequency, FrequencyMode::RelativeToResonance(RelativeFrequency { l_m: -1.0, h1: 0.5 }));
    }

    #[test]
    fn a_values_must_decrease() {
        assert!(check_a_values(&[0.01, 0.01, 0.005]).is_err());
        assert!(check_a_values(&[0.01, 0.005]).is_err());
        assert!(check_a_values(&[0.01, 0.005, 0.0025]).is_ok());
    }
}
