//! Evaluation of the hypotheses behind the far-field expansions and the
//! invertibility cases, for the diagnostics file.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegimeCheck {
    pub group: &'static str,
    pub condition: &'static str,
    pub holds: bool,
    /// `pass` or `warn`.
    pub status: &'static str,
}

/// Inputs of the regime inequalities. `near` is `(l_M, h_1)` when the
/// frequency is tied to the resonance.
#[derive(Debug, Clone, Copy)]
pub struct RegimeInputs {
    pub s: f64,
    pub t: f64,
    pub gamma: f64,
    pub near: Option<(f64, f64)>,
    pub omega: f64,
    pub omega_m: Option<f64>,
    pub tau: f64,
    pub all_negative: bool,
    pub all_positive: bool,
}

pub fn regime_checks(r: &RegimeInputs) -> Vec<RegimeCheck> {
    let (s, t, g) = (r.s, r.t, r.gamma);
    let eps = 1e-12;
    let t_lower = t + eps >= s / 3.0;
    let gamma_one = (g - 1.0).abs() <= eps;
    let below = r.omega_m.is_some_and(|w| r.omega < w);
    let above = r.omega_m.is_some_and(|w| r.omega > w);
    let (lm, h1) = r.near.unwrap_or((0.0, f64::NAN));
    let near = r.near.is_some();
    let mut out = Vec::new();
    let mut push = |group, condition, holds: bool| {
        out.push(RegimeCheck {
            group,
            condition,
            holds,
            status: if holds { "pass" } else { "warn" },
        })
    };
    push("theorem", "0 <= t < 1/2", (0.0..0.5).contains(&t));
    push("theorem", "0 <= s <= 3/2", (0.0..=1.5).contains(&s));
    push("theorem", "0 <= gamma <= 1", (0.0..=1.0).contains(&g));
    push("theorem", "s + gamma <= 2", s + g <= 2.0 + eps);

    push("awayFromResonance", "gamma < 1 or frequency away from resonance", g < 1.0 || !near);
    push("awayFromResonance", "t >= s/3", t_lower);

    push("nearResonance", "gamma = 1", gamma_one);
    push("nearResonance", "0 < h1 < 1", near && h1 > 0.0 && h1 < 1.0);
    push("nearResonance", "t >= s/3", t_lower);
    push("nearResonance", "lM < 0: s + h1 <= 1", near && lm < 0.0 && s + h1 <= 1.0 + eps);
    push("nearResonance", "lM > 0: t + h1 <= 1", near && lm > 0.0 && t + h1 <= 1.0 + eps);
    push(
        "nearResonance",
        "lM > 0: s + h1 < min(3/2 - t, 2 - h1)",
        near && lm > 0.0 && s + h1 < (1.5 - t).min(2.0 - h1),
    );

    let t_range = t_lower && t <= 1.0;
    push("invertibility1a", "coefficients negative", r.all_negative);
    push("invertibility1a", "gamma < 1 or frequency away from resonance", g < 1.0 || !near);
    push("invertibility1a", "0 <= gamma <= 1 and gamma + s <= 2", (0.0..=1.0).contains(&g) && g + s <= 2.0 + eps);
    push("invertibility1a", "s/3 <= t <= 1", t_range);

    push("invertibility1b", "coefficients negative", r.all_negative);
    push("invertibility1b", "gamma = 1 and omega < omegaM", gamma_one && below);
    push("invertibility1b", "s/3 <= t <= 1", t_range);
    push("invertibility1b", "1 - h1 - s >= 0", near && 1.0 - h1 - s >= -eps);

    push("invertibility2a", "coefficients positive", r.all_positive);
    push("invertibility2a", "gamma = 1 and omega > omegaM", gamma_one && above);
    push("invertibility2a", "0 <= t <= 1 - h1", near && t >= 0.0 && t <= 1.0 - h1 + eps);
    push("invertibility2a", "s <= 1", s <= 1.0 + eps);
    push("invertibility2a", "tau > 0", r.tau > 0.0);

    push("invertibility2b", "coefficients positive", r.all_positive);
    push("invertibility2b", "gamma = 1 and omega > omegaM", gamma_one && above);
    push("invertibility2b", "s/3 <= t <= 1", t_range);
    push("invertibility2b", "1 - h1 - s >= 0", near && 1.0 - h1 - s >= -eps);
    out
}
