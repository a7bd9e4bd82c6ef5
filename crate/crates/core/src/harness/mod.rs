//! Configuration-driven pipeline behind the `bubbles` command line tool:
//! cluster generation, functionals, coefficients, the point-interaction
//! solve, far fields, frequency sweeps, convergence studies and oracle runs.
//!
//! Every output is a pure function of the configuration, so reruns produce
//! identical files.

pub mod config;
pub mod regime;
pub mod study;
pub mod sweep;

pub use config::{FrequencyMode, OracleKind, RunConfig, StudyConfig};
pub use regime::{regime_checks, RegimeCheck, RegimeInputs};
pub use study::{convergence_study, study_point, ConvergenceStudy, StudyPoint};
pub use sweep::{resonance_sweep, SweepReport, SweepRow};

use crate::error::{Error, Result};
use crate::fields::{far_field, FarFieldPattern};
use crate::foldy_lax::{
    assemble_with, invertibility_report, solution_bound, solve, AssemblyOptions, FoldyLaxSystem,
    InvertibilityReport, ReportParams, SolverKind, DEFAULT_DENSE_LIMIT,
};
use crate::geometry::{generate_cluster, Cluster};
use crate::numerics::{fibonacci_sphere, norm2_c, Vec3};
use crate::oracle::{bem_solve, mie_sphere, oracle_far_field, MieProblem, OracleSolution};
use crate::physics::{
    coefficient, common_minnaert_frequency, minnaert_frequency, near_resonance_omega, CoefficientVariant,
    Material, MediumSpec, ScatterCoefficient,
};
use crate::shape_functionals::{cluster_functionals, ShapeFunctionals};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Admissible range of `kappa_m / kappa_0`.
pub const SPEED_RATIO_BOUNDS: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Functionals,
    Solve,
    Farfield,
    Sweep,
    Study,
    Oracle,
}

/// Cluster, functionals and medium at one frequency.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub cluster: Cluster,
    pub functionals: Vec<ShapeFunctionals>,
    pub material: Material,
    pub medium: MediumSpec,
    /// Per-bubble Minnaert frequency; `None` where it is not defined.
    pub omega_m: Vec<Option<f64>>,
    pub common_omega_m: Option<f64>,
    /// `(l_M, h_1)` when the frequency is tied to the resonance.
    pub near: Option<(f64, f64)>,
}

impl Prepared {
    pub fn a(&self) -> f64 {
        self.cluster.spec.a
    }

    pub fn omega(&self) -> f64 {
        self.medium.omega
    }
}

/// Geometry, functionals and material; the frequency is resolved separately.
pub fn prepare_geometry(cfg: &RunConfig) -> Result<Prepared> {
    let cluster = generate_cluster(&cfg.cluster)?;
    let functionals = cluster_functionals(&cluster, cfg.functional_order)?;
    let (rho0, k0) = (cfg.medium.rho0, cfg.medium.k0);
    let material = cfg.contrast.material(cluster.spec.a, rho0, k0)?;
    let medium = MediumSpec::uniform(rho0, k0, material, cluster.len(), 1.0);
    let omega_m = functionals
        .iter()
        .map(|f| minnaert_frequency(f, material.rho_b, material.k_b, rho0).ok())
        .collect();
    let common_omega_m = common_minnaert_frequency(&functionals, &medium).ok();
    Ok(Prepared {
        cluster,
        functionals,
        material,
        medium,
        omega_m,
        common_omega_m,
        near: None,
    })
}

/// Sets the frequency from the configured mode; sweeps need `omega`.
pub fn with_frequency(cfg: &RunConfig, mut p: Prepared, omega: Option<f64>) -> Result<Prepared> {
    let w = match (&cfg.frequency, omega) {
        (_, Some(w)) => w,
        (FrequencyMode::Fixed(f), None) => f.omega,
        (FrequencyMode::RelativeToResonance(r), None) => {
            let wm = common_minnaert_frequency(&p.functionals, &p.medium)?;
            p.near = Some((r.l_m, r.h1));
            near_resonance_omega(wm, r.l_m, r.h1, p.a())?
        }
        (FrequencyMode::Sweep(_), None) => {
            return Err(Error::Config("frequency.sweep is only valid for the sweep command".into()))
        }
    };
    p.medium = p.medium.with_omega(w);
    p.medium.validate(cfg.omega_max, SPEED_RATIO_BOUNDS)?;
    Ok(p)
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    with_frequency(cfg, prepare_geometry(cfg)?, None)
}

/// Scattering coefficients of every bubble. The dominating form away from a
/// configured resonance offset uses `l_M a^{h_1} = 1 - omega_M^2/omega^2`.
pub fn coefficients(p: &Prepared, variant: CoefficientVariant) -> Result<Vec<ScatterCoefficient>> {
    let near = match p.near {
        Some((lm, h1)) => Some((p.a(), lm, h1)),
        None => p.common_omega_m.map(|wm| (p.a(), 1.0 - (wm / p.omega()).powi(2), 0.0)),
    };
    (0..p.cluster.len())
        .map(|m| coefficient(variant, &p.functionals[m], &p.medium, m, near))
        .collect()
}

pub fn solve_point(cfg: &RunConfig, p: &Prepared, coeffs: &[ScatterCoefficient]) -> Result<FoldyLaxSystem> {
    let opts = AssemblyOptions {
        dense_limit: cfg.dense_limit.unwrap_or(DEFAULT_DENSE_LIMIT),
        ..Default::default()
    };
    solve(assemble_with(&p.cluster, coeffs, &p.medium, cfg.incident_direction, opts)?)
}

pub fn report(cfg: &RunConfig, p: &Prepared, coeffs: &[ScatterCoefficient]) -> Result<InvertibilityReport> {
    let params = ReportParams {
        a: p.a(),
        gamma: cfg.contrast.gamma(),
        alpha: p.cluster.spec.alpha(),
        m_max: p.cluster.spec.m_max,
        case_hint: cfg.invertibility.case_hint,
    };
    invertibility_report(&p.cluster, coeffs, &p.medium, params)
}

pub fn directions(cfg: &RunConfig) -> Vec<Vec3> {
    fibonacci_sphere(cfg.directions_n)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverSummary {
    pub kind: SolverKind,
    pub residual: f64,
    pub condition_estimate: f64,
    pub q_norm: f64,
    /// `||Q||` bound from the invertibility estimate, when it applies.
    pub q_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoefficientSummary {
    pub variant: CoefficientVariant,
    pub min_re_c_inv: f64,
    pub max_re_c_inv: f64,
    pub min_im_c_inv: f64,
    pub max_im_c_inv: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    pub command: &'static str,
    #[serde(rename = "M")]
    pub m: usize,
    pub a: f64,
    pub realized_d: f64,
    pub omega: f64,
    pub kappa0: f64,
    pub omega_m: Vec<Option<f64>>,
    pub common_omega_m: Option<f64>,
    pub material: Material,
    pub coefficients: CoefficientSummary,
    pub tau: f64,
    pub invertibility: InvertibilityReport,
    pub solver: SolverSummary,
    pub regime: Vec<RegimeCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_section: Option<f64>,
    /// Worker threads used for assembly and far-field evaluation.
    pub threads: usize,
}

pub fn regime_inputs(cfg: &RunConfig, p: &Prepared, coeffs: &[ScatterCoefficient], tau: f64) -> RegimeInputs {
    RegimeInputs {
        s: p.cluster.spec.s,
        t: p.cluster.spec.t,
        gamma: cfg.contrast.gamma(),
        near: p.near,
        omega: p.omega(),
        omega_m: p.common_omega_m,
        tau,
        all_negative: coeffs.iter().all(|c| c.c.re < 0.0),
        all_positive: coeffs.iter().all(|c| c.c.re > 0.0),
    }
}

fn coefficient_summary(variant: CoefficientVariant, coeffs: &[ScatterCoefficient]) -> CoefficientSummary {
    let fold = |f: fn(&ScatterCoefficient) -> f64| {
        let lo = coeffs.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = coeffs.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (min_re, max_re) = fold(|c| c.c_inv.re);
    let (min_im, max_im) = fold(|c| c.c_inv.im);
    CoefficientSummary {
        variant,
        min_re_c_inv: min_re,
        max_re_c_inv: max_re,
        min_im_c_inv: min_im,
        max_im_c_inv: max_im,
    }
}

/// Full pipeline at the configured frequency.
pub fn run(cfg: &RunConfig, command: &'static str) -> Result<(Prepared, FoldyLaxSystem, Diagnostics)> {
    let p = prepare(cfg)?;
    let coeffs = coefficients(&p, cfg.coefficient_variant)?;
    let rep = report(cfg, &p, &coeffs)?;
    let sys = solve_point(cfg, &p, &coeffs)?;
    let diag = Diagnostics {
        command,
        m: p.cluster.len(),
        a: p.a(),
        realized_d: p.cluster.realized_stats.d,
        omega: p.omega(),
        kappa0: p.medium.kappa0(),
        omega_m: p.omega_m.clone(),
        common_omega_m: p.common_omega_m,
        material: p.material,
        coefficients: coefficient_summary(cfg.coefficient_variant, &coeffs),
        tau: sys.tau,
        solver: SolverSummary {
            kind: sys.solver,
            residual: sys.residual_norm,
            condition_estimate: sys.condition_estimate,
            q_norm: norm2_c(&sys.q),
            q_bound: solution_bound(&rep, &sys.rhs),
        },
        regime: regime_checks(&regime_inputs(cfg, &p, &coeffs, sys.tau)),
        invertibility: rep,
        cross_section: None,
        threads: crate::parallel::current_threads(),
    };
    Ok((p, sys, diag))
}

fn q_csv(sys: &FoldyLaxSystem) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("bubble,x,y,z,reQ,imQ\n");
    for (m, (z, q)) in sys.centers.iter().zip(&sys.q).enumerate() {
        let _ = writeln!(s, "{m},{},{},{},{},{}", z.x, z.y, z.z, q.re, q.im);
    }
    s
}

fn functionals_csv(p: &Prepared) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("bubble,x,y,z,aHat,cap,volume,surfaceArea,omegaM\n");
    for (m, (b, f)) in p.cluster.bubbles.iter().zip(&p.functionals).enumerate() {
        let wm = p.omega_m[m].map(|w| w.to_string()).unwrap_or_default();
        let c = b.center;
        let _ = writeln!(
            s,
            "{m},{},{},{},{},{},{},{},{wm}",
            c.x, c.y, c.z, f.a_hat, f.cap, f.volume, f.surface_area
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct FunctionalsSummary {
    #[serde(rename = "M")]
    m: usize,
    a: f64,
    realized_d: f64,
    material: Material,
    common_omega_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleSummary {
    pub source: &'static str,
    pub cross_section: f64,
    pub theta_dir: Vec3,
    pub omega: f64,
    #[serde(rename = "M")]
    pub m: usize,
    /// Root mean square of `|u_FL - u_oracle|` over the directions.
    pub foldy_lax_abs_error: f64,
    pub foldy_lax_rel_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
}

/// Reference solution for a prepared problem: partial waves for one sphere,
/// the boundary integral solver for up to five spheres.
pub fn oracle_solution(cfg: &RunConfig, p: &Prepared, kind: Option<OracleKind>) -> Result<OracleSolution> {
    let m = p.cluster.len();
    let kind = kind.unwrap_or(if m == 1 { OracleKind::Mie } else { OracleKind::Bem });
    match kind {
        OracleKind::Mie => {
            let b = &p.cluster.bubbles[0];
            let radius = match (&b.kind, m) {
                (crate::geometry::ShapeKind::Sphere { radius }, 1) => radius * b.scale,
                _ => {
                    return Err(Error::OracleInfeasible(format!(
                        "the partial-wave oracle needs a single sphere, got {m} bubble(s)"
                    )))
                }
            };
            let mat = p.medium.per_bubble[0];
            let sol = mie_sphere(
                &MieProblem {
                    radius,
                    center: b.center,
                    rho_b: mat.rho_b,
                    k_b: mat.k_b,
                    rho0: p.medium.rho0,
                    k0: p.medium.k0,
                    omega: p.omega(),
                    theta: cfg.incident_direction,
                },
                None,
            )?;
            Ok(OracleSolution::PartialWave(sol))
        }
        OracleKind::Bem => Ok(OracleSolution::Bem(bem_solve(
            &p.cluster,
            &p.medium,
            cfg.incident_direction,
            cfg.oracle.bem_order,
        )?)),
    }
}

/// Root-mean-square and relative L2 differences of two patterns.
pub fn pattern_errors(u: &FarFieldPattern, reference: &FarFieldPattern) -> (f64, f64) {
    let diff: Vec<_> = u.values.iter().zip(&reference.values).map(|(a, b)| a - b).collect();
    let d = norm2_c(&diff);
    let r = norm2_c(&reference.values);
    let rel = if r > 0.0 { d / r } else if d == 0.0 { 0.0 } else { f64::INFINITY };
    (d / (diff.len() as f64).sqrt(), rel)
}

/// Runs `command` and writes its artifacts into `out`. Returns the written
/// paths.
pub fn execute(command: Command, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let path = out.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    match command {
        Command::Functionals => {
            let p = prepare_geometry(cfg)?;
            put("functionals.csv", functionals_csv(&p))?;
            let summary = FunctionalsSummary {
                m: p.cluster.len(),
                a: p.a(),
                realized_d: p.cluster.realized_stats.d,
                material: p.material,
                common_omega_m: p.common_omega_m,
            };
            put("functionals.json", to_json(&summary)?)?;
        }
        Command::Solve => {
            let (_, sys, diag) = run(cfg, "solve")?;
            put("q.csv", q_csv(&sys))?;
            put("diagnostics.json", to_json(&diag)?)?;
        }
        Command::Farfield => {
            let (p, sys, mut diag) = run(cfg, "farfield")?;
            let pattern = far_field(&sys, &directions(cfg), p.omega())?;
            diag.cross_section = Some(pattern.cross_section);
            put("farfield.csv", pattern.to_csv())?;
            put("farfield.json", to_json(&pattern.summary())?)?;
            put("diagnostics.json", to_json(&diag)?)?;
        }
        Command::Oracle => {
            let (p, sys, diag) = run(cfg, "oracle")?;
            let dirs = directions(cfg);
            let fl = far_field(&sys, &dirs, p.omega())?;
            let sol = oracle_solution(cfg, &p, None)?;
            let pattern = oracle_far_field(&sol, &dirs, p.omega());
            let (abs, rel) = pattern_errors(&fl, &pattern);
            let summary = OracleSummary {
                source: sol.source(),
                cross_section: pattern.cross_section,
                theta_dir: pattern.theta,
                omega: pattern.omega,
                m: pattern.m,
                foldy_lax_abs_error: abs,
                foldy_lax_rel_error: rel,
                residual: match &sol {
                    OracleSolution::Bem(b) => Some(b.residual),
                    _ => None,
                },
                l_max: match &sol {
                    OracleSolution::PartialWave(s) => Some(s.l_max),
                    _ => None,
                },
            };
            put("oracle_farfield.csv", pattern.to_csv())?;
            put("oracle.json", to_json(&summary)?)?;
            put("diagnostics.json", to_json(&diag)?)?;
        }
        Command::Sweep => {
            let rep = resonance_sweep(cfg)?;
            put("sweep.csv", rep.to_csv())?;
            put("sweep.json", to_json(&rep.summary)?)?;
        }
        Command::Study => {
            let st = cfg
                .study
                .as_ref()
                .ok_or_else(|| Error::Config("the study command needs a `study` section".into()))?;
            let result = convergence_study(cfg, &st.a_values, st.oracle)?;
            put("study.csv", result.to_csv())?;
            put("study.json", to_json(&result)?)?;
        }
    }
    Ok(written)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Config(e.to_string()))
}
