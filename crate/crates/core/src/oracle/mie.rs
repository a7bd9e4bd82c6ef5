//! Partial-wave solution of the transmission problem for one sphere.
//!
//! Exterior `u^s = sum i^l (2l+1) a_l h_l(k0 r) P_l`, interior
//! `u = sum i^l (2l+1) b_l j_l(kb r) P_l`; `u` and `(1/rho) du/dr` are
//! continuous at the surface.

use super::special::{derivatives, spherical_j, spherical_y};
use crate::error::{Error, Result};
use crate::numerics::{legendre_series, Vec3, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Hard cap on the series length.
pub const MAX_ORDER: usize = 120;
const TAIL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartialWaveSolution {
    pub l_max: usize,
    pub exterior_coeffs: Vec<C64>,
    pub interior_coeffs: Vec<C64>,
    pub radius: f64,
    pub center: Vec3,
    pub rho_b: f64,
    pub k_b: f64,
    pub kappa0: f64,
    pub theta: Vec3,
}

/// Background data for one sphere problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieProblem {
    pub radius: f64,
    pub center: Vec3,
    pub rho_b: f64,
    pub k_b: f64,
    pub rho0: f64,
    pub k0: f64,
    pub omega: f64,
    pub theta: Vec3,
}

fn order_coefficients(p: &MieProblem, lmax: usize) -> (Vec<C64>, Vec<C64>) {
    let k0 = p.omega * (p.rho0 / p.k0).sqrt();
    let kb = p.omega * (p.rho_b / p.k_b).sqrt();
    let (x0, xb) = (k0 * p.radius, kb * p.radius);
    let j0 = spherical_j(lmax + 1, x0);
    let y0 = spherical_y(lmax + 1, x0);
    let jb = spherical_j(lmax + 1, xb);
    let (dj0, dy0, djb) = (derivatives(&j0, x0), derivatives(&y0, x0), derivatives(&jb, xb));
    // flux weights k/rho on each side
    let (wp, wq) = (k0 / p.rho0, kb / p.rho_b);
    let i = C64::new(0.0, 1.0);
    let mut a = Vec::with_capacity(lmax + 1);
    let mut b = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        let h = C64::new(j0[l], y0[l]);
        let dh = C64::new(dj0[l], dy0[l]);
        let den = wp * dh * jb[l] - wq * h * djb[l];
        let num = wq * j0[l] * djb[l] - wp * dj0[l] * jb[l];
        a.push(num / den);
        // Wronskian j y' - j' y = 1/x^2
        b.push(wp * i / (x0 * x0) / den);
    }
    (a, b)
}

/// Solves the sphere problem. With `l_max = None` the series is extended
/// until the tail criterion holds; an explicit `l_max` that fails it is an
/// error.
pub fn mie_sphere(p: &MieProblem, l_max: Option<usize>) -> Result<PartialWaveSolution> {
    if !(p.radius > 0.0) {
        return Err(Error::invalid("oracle", "sphere radius must be positive"));
    }
    if !(p.rho_b > 0.0 && p.k_b > 0.0 && p.rho0 > 0.0 && p.k0 > 0.0 && p.omega > 0.0) {
        return Err(Error::invalid("oracle", "materials and frequency must be positive"));
    }
    let k0 = p.omega * (p.rho0 / p.k0).sqrt();
    let floor = (k0 * p.radius).ceil() as usize + 10;
    let n = l_max.unwrap_or(floor + 30).min(MAX_ORDER);
    let (mut a, mut b) = order_coefficients(p, n);
    // for tiny arguments the Neumann functions overflow at high order
    let finite = |v: &C64| v.re.is_finite() && v.im.is_finite();
    let n = match (0..=n).find(|&l| !finite(&a[l]) || !finite(&b[l])) {
        Some(0) => return Err(Error::TruncationInsufficient("non-finite monopole coefficient".into())),
        Some(k) if l_max.is_some_and(|l| l >= k) => {
            return Err(Error::TruncationInsufficient(format!("coefficients overflow at order {k}")))
        }
        Some(k) => k - 1,
        None => n,
    };
    a.truncate(n + 1);
    b.truncate(n + 1);
    let amax = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ok = |l: usize| amax == 0.0 || a[l].norm() < TAIL * amax;
    let l_max = match l_max {
        Some(l) => {
            if !ok(l) {
                return Err(Error::TruncationInsufficient(format!(
                    "|a_{l}| / max |a_l| = {:.3e} is not below {TAIL:e}",
                    a[l].norm() / amax
                )));
            }
            l
        }
        None => (0..=n)
            .find(|&l| ok(l) && (l >= floor.min(n) || amax == 0.0))
            .ok_or_else(|| Error::TruncationInsufficient(format!("no order up to {n} meets the tail test")))?,
    };
    Ok(PartialWaveSolution {
        l_max,
        exterior_coeffs: a[..=l_max].to_vec(),
        interior_coeffs: b[..=l_max].to_vec(),
        radius: p.radius,
        center: p.center,
        rho_b: p.rho_b,
        k_b: p.k_b,
        kappa0: k0,
        theta: p.theta,
    })
}

impl PartialWaveSolution {
    /// `u^inf(x) = 4 pi (-i/k0) e^{i k0 (theta - x).z} sum (2l+1) a_l P_l(x.theta)`
    pub fn far_field_values(&self, dirs: &[Vec3]) -> Vec<C64> {
        let k = self.kappa0;
        let coeffs: Vec<C64> = self
            .exterior_coeffs
            .iter()
            .enumerate()
            .map(|(l, a)| a * (2 * l + 1) as f64)
            .collect();
        let pref = C64::new(0.0, -4.0 * PI / k);
        dirs.iter()
            .map(|x| {
                let phase = C64::new(0.0, k * (self.theta - *x).dot(self.center)).exp();
                pref * phase * legendre_series(&coeffs, x.dot(self.theta).clamp(-1.0, 1.0))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(rho_b: f64, k_b: f64, omega: f64) -> MieProblem {
        MieProblem {
            radius: 0.005,
            center: Vec3::ZERO,
            rho_b,
            k_b,
            rho0: 1000.0,
            k0: 2.25e9,
            omega,
            theta: Vec3::E3,
        }
    }

    #[test]
    fn no_contrast_means_no_scattering() {
        let s = mie_sphere(&problem(1000.0, 2.25e9, 9000.0), None).unwrap();
        assert!(s.exterior_coeffs.iter().all(|a| a.norm() < 1e-15));
        assert!(s.far_field_values(&[Vec3::E1, Vec3::E3]).iter().all(|u| u.norm() < 1e-12));
    }

    #[test]
    fn monopole_dominates_in_rayleigh_regime() {
        // k0 r = 1e-2
        let omega = 1e-2 / 0.005 * (2.25e9_f64 / 1000.0).sqrt();
        let rho_b = 12.0 * 1e-4 * 1000.0;
        let s = mie_sphere(&problem(rho_b, rho_b * 2.25e6, omega), None).unwrap();
        assert!(s.exterior_coeffs[0].norm() > 100.0 * s.exterior_coeffs[1].norm());
    }

    #[test]
    fn explicit_truncation_is_checked() {
        let p = problem(1.2, 2.7e6, 9000.0);
        assert!(matches!(mie_sphere(&p, Some(0)), Err(Error::TruncationInsufficient(_))));
        assert!(mie_sphere(&p, Some(12)).is_ok());
    }

    #[test]
    fn forward_direction_is_regular() {
        let s = mie_sphere(&problem(1.2, 2.7e6, 9000.0), None).unwrap();
        let u = s.far_field_values(&[Vec3::E3, Vec3::new(0.0, 1e-9, 1.0).normalized()]);
        assert!(u[0].norm().is_finite() && (u[0] - u[1]).norm() < 1e-6 * u[0].norm());
    }
}
