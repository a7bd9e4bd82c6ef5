//! End-to-end acceptance checks. Runs as a plain binary so that the
//! per-criterion lines are always printed; exits non-zero if any fails.

use bubbles_core::boundary_ops::build_quadrature;
use bubbles_core::fields::far_field;
use bubbles_core::foldy_lax::{invertibility_report, ReportParams, Verdict};
use bubbles_core::geometry::{distance_sum, generate_cluster, BubbleShape, Cluster, ClusterSpec, TriMesh};
use bubbles_core::harness::config::{OracleKind, RunConfig};
use bubbles_core::harness::study::{convergence_study, study_point};
use bubbles_core::harness::{directions, execute, oracle_solution, pattern_errors, prepare, run, Command};
use bubbles_core::oracle::oracle_far_field;
use bubbles_core::physics::{
    leading_coefficient, leading_denominator, minnaert_frequency, Material, MediumSpec,
};
use bubbles_core::shape_functionals::{compute_a_hat, compute_capacitance, compute_functionals};
use bubbles_core::{Error, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn config(name: &str) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn sphere_capacitance() -> Outcome {
    let start = Instant::now();
    let q = build_quadrature(&BubbleShape::sphere(Vec3::ZERO, 1.0), 3).map_err(|e| e.to_string())?;
    let cap = compute_capacitance(&q).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let err = rel(cap, 4.0 * PI);
    check(
        err <= 1e-3 && took < Duration::from_secs(5),
        format!("Cap = {cap:.8}, rel. error {err:.2e}, {took:.2?}"),
    )
}

fn sphere_a_hat() -> Outcome {
    let q = build_quadrature(&BubbleShape::sphere(Vec3::ZERO, 1.0), 3).map_err(|e| e.to_string())?;
    let a = compute_a_hat(&q);
    let err = rel(a, -8.0 * PI / 3.0);
    let ico = build_quadrature(&BubbleShape::mesh(Vec3::ZERO, TriMesh::icosphere(1.0, 3)), 1).map_err(|e| e.to_string())?;
    let ico_err = rel(compute_a_hat(&ico), -8.0 * PI / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::MIN;
    for _ in 0..20 {
        let mesh = TriMesh::random_star_shaped(&mut rng, 2, 0.3);
        let q = build_quadrature(&BubbleShape::mesh(Vec3::ZERO, mesh), 1).map_err(|e| e.to_string())?;
        worst = worst.max(compute_a_hat(&q));
    }
    check(
        err <= 5e-3 && ico_err <= 1e-2 && worst < 0.0,
        format!("A_hat = {a:.8}, rel. error {err:.2e}, icosphere {ico_err:.2e}; largest of 20 star-shaped meshes {worst:.4}"),
    )
}

fn scaling_triple() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shapes = [
        BubbleShape::sphere(Vec3::ZERO, 1.0),
        BubbleShape::ellipsoid(Vec3::ZERO, [1.0, 0.8, 0.5]),
        BubbleShape::mesh(Vec3::ZERO, TriMesh::random_star_shaped(&mut rng, 2, 0.3)),
    ];
    let mut worst = 0.0_f64;
    for shape in &shapes {
        let base = compute_functionals(shape, 2).map_err(|e| e.to_string())?;
        for delta in [1e-1, 1e-2, 1e-3] {
            let f = compute_functionals(&shape.scaled(delta), 2).map_err(|e| e.to_string())?;
            worst = worst
                .max(rel(f.a_hat, base.a_hat * delta * delta))
                .max(rel(f.cap, base.cap * delta))
                .max(rel(f.volume, base.volume * delta.powi(3)));
        }
    }
    check(worst <= 1e-8, format!("largest relative deviation {worst:.2e} over 3 shapes x 3 scales"))
}

fn minnaert_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho0 = 1000.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for _ in 0..5 {
        let r: f64 = 10f64.powf(rng.random_range(-4.0..-2.0));
        let rho_b: f64 = rho0 * 10f64.powf(rng.random_range(-4.0..-1.0));
        let k_b: f64 = 1e5 * 10f64.powf(rng.random_range(0.0..1.5));
        let f = compute_functionals(&BubbleShape::sphere(Vec3::ZERO, r), 2).map_err(|e| e.to_string())?;
        let mat = Material { rho_b, k_b };
        let wm = minnaert_frequency(&f, rho_b, k_b, rho0).map_err(|e| e.to_string())?;
        let lo = leading_denominator(&f, mat, rho0, wm * (1.0 - 5e-7));
        let hi = leading_denominator(&f, mat, rho0, wm * (1.0 + 5e-7));
        ok &= lo.signum() != hi.signum();
        lines.push(format!("{wm:.4e}"));
    }
    check(ok, format!("sign change inside [w_M(1-5e-7), w_M(1+5e-7)] at w_M = {}", lines.join(", ")))
}

fn study(name: &str) -> Result<bubbles_core::harness::study::ConvergenceStudy, String> {
    let cfg = config(name);
    let st = cfg.study.clone().ok_or("config has no study section")?;
    convergence_study(&cfg, &st.a_values, st.oracle).map_err(|e| e.to_string())
}

fn single_bubble_convergence() -> Outcome {
    let start = Instant::now();
    let s = study("study_mie.json")?;
    let took = start.elapsed();
    check(
        s.fitted_slope >= 1.7 && took < Duration::from_secs(60),
        format!("slope {:.3} (predicted {}), errors {:?}, {took:.2?}", s.fitted_slope, s.predicted_slope, s.errors),
    )
}

fn near_resonance() -> Outcome {
    let lead = study("study_near.json")?;
    let refined = study("study_near_refined.json")?;
    check(
        lead.fitted_slope >= 0.7 && refined.fitted_slope >= lead.fitted_slope - 0.1,
        format!(
            "leading slope {:.3} (predicted {}), refined slope {:.3}",
            lead.fitted_slope, lead.predicted_slope, refined.fitted_slope
        ),
    )
}

fn multi_bubble_oracle() -> Outcome {
    let start = Instant::now();
    let three = config("bem_three.json");
    let mut two = three.clone();
    if let Some(c) = two.cluster.centers.as_mut() {
        c.truncate(2);
    }
    let mut ratios = Vec::new();
    for cfg in [&two, &three] {
        let coarse = study_point(cfg, 5e-3, OracleKind::Bem).map_err(|e| e.to_string())?;
        let fine = study_point(cfg, 2.5e-3, OracleKind::Bem).map_err(|e| e.to_string())?;
        ratios.push(coarse.error / fine.error);
    }
    let single = config("single_bubble.json");
    let p = prepare(&single).map_err(|e| e.to_string())?;
    let dirs = directions(&single);
    let bem = oracle_solution(&single, &p, Some(OracleKind::Bem)).map_err(|e| e.to_string())?;
    let mie = oracle_solution(&single, &p, Some(OracleKind::Mie)).map_err(|e| e.to_string())?;
    let (_, bem_vs_mie) = pattern_errors(
        &oracle_far_field(&bem, &dirs, p.omega()),
        &oracle_far_field(&mie, &dirs, p.omega()),
    );
    let took = start.elapsed();
    check(
        ratios.iter().all(|r| *r >= 1.4) && bem_vs_mie <= 0.01 && took < Duration::from_secs(600),
        format!(
            "error ratio a=5e-3 -> 2.5e-3: 2 spheres {:.3}, 3 spheres {:.3}; BEM vs Mie {bem_vs_mie:.2e}; {took:.2?}",
            ratios[0], ratios[1]
        ),
    )
}

fn invertibility() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for case in ["1a", "1b", "2a", "2b"] {
        let cfg = config(&format!("invertibility_{case}.json"));
        let (_, _, diag) = run(&cfg, "solve").map_err(|e| format!("{case}: {e}"))?;
        let good = diag.invertibility.satisfied == Verdict::Yes && diag.solver.residual <= 1e-10;
        ok &= good;
        lines.push(format!("{case}: {:?} res {:.1e}", diag.invertibility.satisfied, diag.solver.residual));
    }
    // two bubbles on opposite sides of their resonances
    let cluster = Cluster::from_bubbles(vec![
        BubbleShape::sphere(Vec3::ZERO, 0.005),
        BubbleShape::sphere(Vec3::new(0.3, 0.0, 0.0), 0.005),
    ])
    .map_err(|e| e.to_string())?;
    let f = compute_functionals(&cluster.bubbles[0], 2).map_err(|e| e.to_string())?;
    let medium = MediumSpec {
        rho0: 1000.0,
        k0: 2.25e9,
        per_bubble: vec![
            Material { rho_b: 1.2, k_b: 1.0e5 },
            Material { rho_b: 1.2, k_b: 4.0e5 },
        ],
        omega: 0.0,
    };
    let w1 = minnaert_frequency(&f, 1.2, 1.0e5, 1000.0).map_err(|e| e.to_string())?;
    let w2 = minnaert_frequency(&f, 1.2, 4.0e5, 1000.0).map_err(|e| e.to_string())?;
    let medium = medium.with_omega(0.5 * (w1 + w2));
    let coeffs = (0..2)
        .map(|m| leading_coefficient(&f, &medium, m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let params = ReportParams {
        a: 0.01,
        gamma: 1.0,
        alpha: 1.0,
        m_max: 4.0,
        case_hint: None,
    };
    let mixed = invertibility_report(&cluster, &coeffs, &medium, params);
    let rejected = matches!(mixed, Err(Error::MixedSignCoefficients { .. }));
    ok &= rejected;
    lines.push(format!("mixed signs rejected: {rejected}"));
    check(ok, lines.join("; "))
}

fn counting_bounds() -> Outcome {
    let mut constants = [Vec::new(), Vec::new(), Vec::new()];
    let ks = [1.0, 3.0, 4.0];
    for seed in 1..=10 {
        let c = generate_cluster(&ClusterSpec::new(0.01, 1.0, 1.0 / 3.0, seed)).map_err(|e| e.to_string())?;
        let d = c.realized_stats.d;
        let side = c.subcube_side;
        for (i, k) in ks.iter().enumerate() {
            let sum = (0..c.len())
                .map(|j| distance_sum(&c, j, *k))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?
                .into_iter()
                .fold(0.0, f64::max);
            let bound = if *k < 3.0 {
                d.powf(-k) + side.powi(-3)
            } else if *k == 3.0 {
                d.powi(-3) + side.powi(-3) * side.ln().abs()
            } else {
                d.powf(-k) + side.powf(-k)
            };
            constants[i].push(sum / bound);
        }
    }
    let ratios: Vec<f64> = constants
        .iter()
        .map(|c| c.iter().cloned().fold(f64::MIN, f64::max) / c.iter().cloned().fold(f64::MAX, f64::min))
        .collect();
    check(
        ratios.iter().all(|r| *r <= 3.0),
        format!("max/min fitted constant over 10 seeds: k=1 {:.3}, k=3 {:.3}, k=4 {:.3}", ratios[0], ratios[1], ratios[2]),
    )
}

fn reproducibility() -> Outcome {
    let cfg = config("study_mie.json");
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for d in &dirs {
        execute(Command::Study, &cfg, d.path()).map_err(|e| e.to_string())?;
    }
    let a = std::fs::read(dirs[0].path().join("study.csv")).map_err(|e| e.to_string())?;
    let b = std::fs::read(dirs[1].path().join("study.csv")).map_err(|e| e.to_string())?;
    check(a == b && !a.is_empty(), format!("study.csv {} bytes, identical: {}", a.len(), a == b))
}

fn performance() -> Outcome {
    let cfg = config("perf_5000.json");
    let start = Instant::now();
    let (p, sys, _) = run(&cfg, "solve").map_err(|e| e.to_string())?;
    let solve_time = start.elapsed();
    let dirs = directions(&cfg);
    let start = Instant::now();
    let values = bubbles_core::fields::far_field_values(sys.kappa0, &sys.centers, &sys.q, &dirs);
    let ff_time = start.elapsed();
    let _ = far_field(&sys, &dirs, p.omega()).map_err(|e| e.to_string())?;
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    check(
        sys.len() >= 5000 && values.len() == 590 && solve_time < Duration::from_secs(120) && ff_time < Duration::from_secs(1),
        format!(
            "M = {}, assemble+solve {solve_time:.2?}, far field on {} directions {ff_time:.2?}, {threads} thread(s)",
            sys.len(),
            dirs.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 sphere capacitance", sphere_capacitance),
        ("2 sphere A_hat and negativity", sphere_a_hat),
        ("3 scaling triple", scaling_triple),
        ("4 Minnaert sign change", minnaert_identity),
        ("5 single-bubble convergence", single_bubble_convergence),
        ("6 near-resonance degradation", near_resonance),
        ("7 multi-bubble oracle equivalence", multi_bubble_oracle),
        ("8 invertibility diagnostics", invertibility),
        ("9 counting bounds", counting_bounds),
        ("10 reproducibility", reproducibility),
        ("11 performance envelope", performance),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("PASS criterion {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
