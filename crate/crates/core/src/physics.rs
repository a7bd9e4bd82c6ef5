//! Materials, wavenumbers, the Minnaert frequency and the scattering
//! coefficients `C_m`.

use crate::error::{Error, Result};
use crate::shape_functionals::ShapeFunctionals;
use crate::numerics::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Material {
    #[serde(rename = "rhoB")]
    pub rho_b: f64,
    #[serde(rename = "kB")]
    pub k_b: f64,
}

/// Background medium, per-bubble materials and the angular frequency (SI).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MediumSpec {
    pub rho0: f64,
    pub k0: f64,
    pub per_bubble: Vec<Material>,
    pub omega: f64,
}

impl MediumSpec {
    pub fn uniform(rho0: f64, k0: f64, material: Material, m: usize, omega: f64) -> Self {
        MediumSpec {
            rho0,
            k0,
            per_bubble: vec![material; m],
            omega,
        }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        MediumSpec {
            omega,
            ..self.clone()
        }
    }

    /// `kappa_0 = omega sqrt(rho_0 / k_0)`
    pub fn kappa0(&self) -> f64 {
        self.omega * (self.rho0 / self.k0).sqrt()
    }

    /// `kappa_m = omega sqrt(rho_m / k_m)`
    pub fn kappa(&self, m: usize) -> f64 {
        let mat = self.per_bubble[m];
        self.omega * (mat.rho_b / mat.k_b).sqrt()
    }

    /// Positivity, `omega <= omega_max` and `kappa_m / kappa_0` inside
    /// `ratio_bounds`.
    pub fn validate(&self, omega_max: Option<f64>, ratio_bounds: (f64, f64)) -> Result<()> {
        let bad = |d: String| Err(Error::invalid("physics", d));
        if !(self.rho0 > 0.0 && self.k0 > 0.0) {
            return bad(format!("background rho0 = {}, k0 = {} must be positive", self.rho0, self.k0));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega = {} must be positive", self.omega));
        }
        if let Some(wmax) = omega_max {
            if self.omega > wmax {
                return bad(format!("omega = {} exceeds omegaMax = {wmax}", self.omega));
            }
        }
        for (m, mat) in self.per_bubble.iter().enumerate() {
            if !(mat.rho_b > 0.0 && mat.k_b > 0.0) {
                return bad(format!("bubble {m}: rhoB and kB must be positive"));
            }
            let ratio = self.kappa(m) / self.kappa0();
            if ratio < ratio_bounds.0 || ratio > ratio_bounds.1 {
                return bad(format!(
                    "bubble {m}: kappa_m / kappa_0 = {ratio:.4} outside [{}, {}]",
                    ratio_bounds.0, ratio_bounds.1
                ));
            }
        }
        Ok(())
    }
}

/// Contrast law `rho_m = C_rho a^beta rho_0` with `k_m` chosen so that
/// `kappa_m / kappa_0 = speed_ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ContrastLaw {
    pub c_rho: f64,
    pub beta: f64,
    #[serde(default = "unit_ratio")]
    pub speed_ratio: f64,
}

fn unit_ratio() -> f64 {
    1.0
}

impl ContrastLaw {
    pub fn gamma(&self) -> f64 {
        self.beta - 1.0
    }

    pub fn material(&self, a: f64, rho0: f64, k0: f64) -> Result<Material> {
        if !(self.beta > 0.0 && self.c_rho > 0.0 && self.speed_ratio > 0.0) {
            return Err(Error::invalid("physics", "contrast law needs beta, cRho, speedRatio > 0"));
        }
        let rho_b = self.c_rho * a.powf(self.beta) * rho0;
        let k_b = rho_b * k0 / (rho0 * self.speed_ratio * self.speed_ratio);
        Ok(Material { rho_b, k_b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CoefficientVariant {
    #[default]
    Leading,
    Refined,
    Dominating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScatterCoefficient {
    pub c: C64,
    pub c_inv: C64,
    pub variant: CoefficientVariant,
}

impl ScatterCoefficient {
    fn from_inverse(c_inv: C64, variant: CoefficientVariant) -> Result<Self> {
        if c_inv == C64::new(0.0, 0.0) || !c_inv.re.is_finite() || !c_inv.im.is_finite() {
            return Err(Error::DivisionDegenerate(format!(
                "inverse scattering coefficient {c_inv} cannot be inverted"
            )));
        }
        Ok(ScatterCoefficient {
            c: 1.0 / c_inv,
            c_inv,
            variant,
        })
    }
}

/// `omega_M = sqrt(8 pi k_b / ((rho_b - rho_0) A_hat))`
pub fn minnaert_frequency(f: &ShapeFunctionals, rho_b: f64, k_b: f64, rho0: f64) -> Result<f64> {
    if !(f.a_hat < 0.0) {
        return Err(Error::NonPositiveResonance(format!("A_hat = {} is not negative", f.a_hat)));
    }
    if !(rho_b < rho0) {
        return Err(Error::NonPositiveResonance(format!(
            "bubble density {rho_b} is not below the background density {rho0}"
        )));
    }
    Ok((8.0 * PI * k_b / ((rho_b - rho0) * f.a_hat)).sqrt())
}

/// Per-bubble Minnaert frequencies; errors if they differ by more than
/// 1e-6 relative, otherwise returns their mean.
pub fn common_minnaert_frequency(functionals: &[ShapeFunctionals], medium: &MediumSpec) -> Result<f64> {
    let w: Vec<f64> = functionals
        .iter()
        .zip(&medium.per_bubble)
        .map(|(f, m)| minnaert_frequency(f, m.rho_b, m.k_b, medium.rho0))
        .collect::<Result<_>>()?;
    let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = w.iter().cloned().fold(0.0, f64::max);
    if hi - lo > 1e-6 * hi {
        return Err(Error::invalid(
            "physics",
            format!("per-bubble Minnaert frequencies differ ({lo:.6e} .. {hi:.6e}); a common resonance is required"),
        ));
    }
    Ok(w.iter().sum::<f64>() / w.len() as f64)
}

/// Denominator `rho_m/(rho_m - rho_0) - kappa_m^2 A_hat / (8 pi)` of the
/// leading coefficient.
pub fn leading_denominator(f: &ShapeFunctionals, mat: Material, rho0: f64, omega: f64) -> f64 {
    let km2 = omega * omega * mat.rho_b / mat.k_b;
    mat.rho_b / (mat.rho_b - rho0) - km2 * f.a_hat / (8.0 * PI)
}

/// `C_m = kappa_m^2 |D_m| / (rho_m/(rho_m - rho_0) - kappa_m^2 A_hat_m / (8 pi))`
pub fn leading_coefficient(f: &ShapeFunctionals, medium: &MediumSpec, m: usize) -> Result<ScatterCoefficient> {
    let mat = medium.per_bubble[m];
    if mat.rho_b == medium.rho0 {
        return Err(Error::DivisionDegenerate("rho_m = rho_0".into()));
    }
    let km2 = medium.kappa(m).powi(2);
    let t1 = mat.rho_b / (mat.rho_b - medium.rho0);
    let t2 = km2 * f.a_hat / (8.0 * PI);
    let den = t1 - t2;
    if den.abs() <= 1e-12 * (t1.abs() + t2.abs()) {
        return Err(Error::AtResonance { denominator: den });
    }
    let num = km2 * f.volume;
    Ok(ScatterCoefficient {
        c: C64::new(num / den, 0.0),
        c_inv: C64::new(den / num, 0.0),
        variant: CoefficientVariant::Leading,
    })
}

/// Refined inverse coefficient built from `I^d`, `I^s` and `J`.
pub fn refined_inverse_coefficient(
    f: &ShapeFunctionals,
    medium: &MediumSpec,
    m: usize,
) -> Result<ScatterCoefficient> {
    let mat = medium.per_bubble[m];
    let (rho0, rhom) = (medium.rho0, mat.rho_b);
    if rhom == rho0 {
        return Err(Error::DivisionDegenerate("rho_m = rho_0".into()));
    }
    let k0 = medium.kappa0();
    let km = medium.kappa(m);
    let km2 = km * km;
    let x = km2 + rhom / rho0 * (km2 - k0 * k0);
    if x == 0.0 || km == 0.0 || f.volume == 0.0 {
        return Err(Error::DivisionDegenerate(format!(
            "kappa_m^2 + (rho_m/rho_0)(kappa_m^2 - kappa_0^2) = {x}, kappa_m = {km}"
        )));
    }
    let i = C64::new(0.0, 1.0);
    let dinv = 1.0 / f.volume;
    let id = dinv * (rhom / (rhom - rho0) + (-km2 - rhom / rho0 * (km2 - k0 * k0)) * f.a_hat / (8.0 * PI));
    let is = i * (km2 * km / (4.0 * PI)
        - (k0 - km) * km2 * dinv * f.a_hat * f.cap / (32.0 * PI * PI));
    let j = rho0 / (rhom - rho0) / (4.0 * PI)
        * (k0 - km)
        * km2
        * (1.0 + f.a_hat * dinv * f.cap / (8.0 * PI))
        * f.cap;
    let c_inv = (C64::new(id, 0.0) - i * (id * j / x)) / x + (is - id * j * j / (km2 * km2)) / km2;
    ScatterCoefficient::from_inverse(c_inv, CoefficientVariant::Refined)
}

/// Dominant near-resonance form of `C_m^{-1}` written on the rescaled shape
/// `B = D / a`, for `1 - omega_M^2/omega^2 = l_M a^{h_1}`.
pub fn dominating_inverse_coefficient(
    f: &ShapeFunctionals,
    medium: &MediumSpec,
    m: usize,
    a: f64,
    l_m: f64,
    h1: f64,
) -> Result<ScatterCoefficient> {
    let a_bar = f.a_hat / (a * a);
    let vol_b = f.volume / (a * a * a);
    let cap_b = f.cap / a;
    let k0 = medium.kappa0();
    let km = medium.kappa(m);
    let re = -l_m * a_bar * a.powf(h1 - 1.0) / (8.0 * PI * vol_b);
    let im = km / (4.0 * PI) - (k0 - km) * a_bar * cap_b / (32.0 * PI * PI * vol_b);
    ScatterCoefficient::from_inverse(C64::new(re, im), CoefficientVariant::Dominating)
}

/// Coefficient of the requested variant. `near` carries `(a, l_M, h_1)` for
/// the dominating form.
pub fn coefficient(
    variant: CoefficientVariant,
    f: &ShapeFunctionals,
    medium: &MediumSpec,
    m: usize,
    near: Option<(f64, f64, f64)>,
) -> Result<ScatterCoefficient> {
    match variant {
        CoefficientVariant::Leading => leading_coefficient(f, medium, m),
        CoefficientVariant::Refined => refined_inverse_coefficient(f, medium, m),
        CoefficientVariant::Dominating => {
            let (a, l_m, h1) = near.ok_or_else(|| {
                Error::invalid("physics", "the dominating coefficient needs a near-resonance frequency (lM, h1)")
            })?;
            dominating_inverse_coefficient(f, medium, m, a, l_m, h1)
        }
    }
}

/// `omega = omega_M / sqrt(1 - l_M a^{h_1})`
pub fn near_resonance_omega(omega_m: f64, l_m: f64, h1: f64, a: f64) -> Result<f64> {
    let x = l_m * a.powf(h1);
    if x >= 1.0 {
        return Err(Error::UnreachableFrequency(format!(
            "l_M a^h1 = {x} >= 1 has no real frequency"
        )));
    }
    Ok(omega_m / (1.0 - x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Vec3;

    fn sphere(r: f64) -> ShapeFunctionals {
        ShapeFunctionals {
            a_hat: -(8.0 * PI / 3.0) * r * r,
            cap: 4.0 * PI * r,
            volume: 4.0 * PI * r * r * r / 3.0,
            surface_area: 4.0 * PI * r * r,
            centroid_offset: Vec3::ZERO,
        }
    }

    fn medium(omega: f64, mat: Material) -> MediumSpec {
        MediumSpec::uniform(1000.0, 2.25e9, mat, 1, omega)
    }

    #[test]
    fn classical_minnaert_law() {
        let r = 1e-3;
        let (rho_b, k_b, rho0) = (1.2, 1.4e5, 1000.0);
        let w = minnaert_frequency(&sphere(r), rho_b, k_b, rho0).unwrap();
        let exact = (3.0 * k_b / ((rho0 - rho_b) * r * r)).sqrt();
        assert!((w - exact).abs() < 1e-12 * exact);
        let w2 = minnaert_frequency(&sphere(2.0 * r), rho_b, k_b, rho0).unwrap();
        assert!((w2 - 0.5 * w).abs() < 1e-12 * w);
        assert!(matches!(
            minnaert_frequency(&sphere(r), 1000.0, k_b, rho0),
            Err(Error::NonPositiveResonance(_))
        ));
    }

    #[test]
    fn sphere_leading_coefficient_has_minnaert_form() {
        let r = 0.01;
        let mat = Material { rho_b: 0.1, k_b: 0.1 * 2.25e9 / 1000.0 };
        let wm = minnaert_frequency(&sphere(r), mat.rho_b, mat.k_b, 1000.0).unwrap();
        for ratio in [0.5, 1.5] {
            let c = leading_coefficient(&sphere(r), &medium(ratio * wm, mat), 0).unwrap();
            let expected = 4.0 * PI * r / (1.0 - 1.0 / (ratio * ratio));
            assert!((c.c.re - expected).abs() < 1e-10 * expected.abs());
            assert_eq!(c.c_inv.re.signum(), (ratio - 1.0).signum());
            assert!((c.c * c.c_inv - 1.0).norm() < 1e-12);
        }
        assert!(matches!(
            leading_coefficient(&sphere(r), &medium(wm, mat), 0),
            Err(Error::AtResonance { .. })
        ));
    }

    #[test]
    fn refined_reduces_to_leading_plus_radiation() {
        let r = 0.004;
        let mat = Material { rho_b: 0.2, k_b: 0.2 * 2.25e9 / 1000.0 };
        let med = medium(12000.0, mat);
        let lead = leading_coefficient(&sphere(r), &med, 0).unwrap();
        let refined = refined_inverse_coefficient(&sphere(r), &med, 0).unwrap();
        let expected = lead.c_inv + C64::new(0.0, med.kappa0() / (4.0 * PI));
        assert!((refined.c_inv - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn near_resonance_round_trip() {
        assert_eq!(near_resonance_omega(5.0, 0.0, 0.5, 0.01).unwrap(), 5.0);
        let w = near_resonance_omega(1e6, 0.19, 1.0, 1.0).unwrap();
        assert!((w - 1e6 / 0.9).abs() < 1e-6);
        let a: f64 = 0.003;
        let w = near_resonance_omega(2.0, -1.3, 0.5, a).unwrap();
        assert!(((1.0 - 4.0 / (w * w)) - (-1.3 * a.sqrt())).abs() < 1e-12);
        assert!(matches!(near_resonance_omega(1.0, 2.0, 0.5, 0.25), Err(Error::UnreachableFrequency(_))));
    }
}
