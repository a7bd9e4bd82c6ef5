use bubbles_core::Vec3;
use bubbles_web::{
    compare_with_oracle, compare_with_oracle_data, far_field_cut, far_field_cut_data, great_circle,
    resonance_sweep_data,
};
use proptest::prelude::*;

const SINGLE: &str = r#"{
    "cluster": { "a": 0.01, "placement": "centered" },
    "contrast": { "cRho": 12, "beta": 2 },
    "frequency": { "fixed": { "omega": 9000 } }
}"#;

const PAIR: &str = r#"{
    "cluster": { "a": 0.005, "centers": [[0, 0, 0], [0.2, 0.05, 0]] },
    "contrast": { "cRho": 12, "beta": 2 },
    "frequency": { "fixed": { "omega": 9000 } },
    "incidentDirection": [0, 0, 1],
    "oracle": { "bemOrder": 1 }
}"#;

proptest! {
    #[test]
    fn great_circle_passes_through_theta(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, n in 8usize..64) {
        let v = Vec3::new(x, y, z);
        prop_assume!(v.norm() > 0.1);
        let theta = v.normalized();
        let (angles, dirs) = great_circle(theta, n);
        prop_assert_eq!(angles.len(), n);
        prop_assert!((dirs[0] - theta).norm() < 1e-14);
        let normal = dirs[0].cross(dirs[n / 4 + 1]).normalized();
        for (psi, d) in angles.iter().zip(&dirs) {
            prop_assert!((d.norm() - 1.0).abs() < 1e-14);
            prop_assert!((d.dot(theta) - psi.cos()).abs() < 1e-12);
            prop_assert!(d.dot(normal).abs() < 1e-12);
        }
    }
}

#[test]
fn single_bubble_cut_is_flat() {
    let cut = far_field_cut_data(SINGLE, 72).unwrap();
    assert_eq!(cut.m, 1);
    assert_eq!(cut.abs_u.len(), 72);
    let first = cut.abs_u[0];
    assert!(cut.abs_u.iter().all(|v| (v - first).abs() <= 1e-14 * first));
    // isotropic pattern: cross section is 4 pi |u|^2
    let expect = 4.0 * std::f64::consts::PI * first * first;
    assert!((cut.cross_section - expect).abs() <= 1e-10 * expect);
    assert!(cut.common_omega_m.is_some());
}

#[test]
fn cut_json_has_plot_fields() {
    let text = far_field_cut(SINGLE, 16).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["angles", "absU", "crossSection", "M", "omega", "commonOmegaM", "centers"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn sweep_brackets_the_resonance() {
    let cfg = r#"{
        "cluster": { "a": 0.01, "placement": "centered" },
        "contrast": { "cRho": 12, "beta": 2 },
        "frequency": { "sweep": { "omegaMin": 12000, "omegaMax": 24000, "count": 61 } }
    }"#;
    let s = resonance_sweep_data(cfg).unwrap();
    assert_eq!(s.omega.len(), 61);
    let wm = s.summary.common_omega_m.unwrap();
    let flips = s.re_c_inv.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(flips, 1);
    let (i, _) = s
        .cross_section
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap()))
        .unwrap();
    assert!((s.omega[i] - wm).abs() <= 200.0 + 1e-9, "{} vs {wm}", s.omega[i]);
}

#[test]
fn single_sphere_matches_partial_waves() {
    let c = compare_with_oracle_data(SINGLE, 64).unwrap();
    assert_eq!(c.source, "oracle:mie");
    assert_eq!(c.foldy_lax.len(), 64);
    assert_eq!(c.oracle.len(), 64);
    assert!(c.rel_error < 0.05, "{}", c.rel_error);
    assert!((c.foldy_lax_cross_section / c.oracle_cross_section - 1.0).abs() < 0.1);
}

#[test]
fn pair_uses_the_boundary_solver() {
    let c = compare_with_oracle_data(PAIR, 32).unwrap();
    assert_eq!(c.source, "oracle:bem");
    assert!(c.abs_error.is_finite() && c.rel_error < 0.05, "{}", c.rel_error);
}

#[test]
fn errors_are_reported_as_text() {
    let e = far_field_cut(r#"{ "cluster": { "a": "x" } }"#, 16).unwrap_err();
    assert!(e.contains("cluster.a"), "{e}");
    assert!(far_field_cut(SINGLE, 2).unwrap_err().contains("samples"));
    assert!(compare_with_oracle(SINGLE, 100_000).is_err());
}
