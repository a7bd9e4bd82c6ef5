use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bubbles(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bubbles"));
    cmd.args(args).env_remove("BUBBLES_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn canned(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn single_bubble_far_field_is_isotropic() {
    let out = tempfile::tempdir().unwrap();
    let o = bubbles(&["farfield", "--config", &canned("single_bubble.json"), "--out", out.path().to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.path().join("farfield.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("dirX,dirY,dirZ,reU,imU,absU"));
    let abs: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(abs.len(), 590);
    assert!(abs.iter().all(|v| (v - abs[0]).abs() <= 1e-14 * abs[0]));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("farfield.json")).unwrap()).unwrap();
    for key in ["crossSection", "thetaDir", "omega", "M"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    let printed = String::from_utf8_lossy(&o.stdout);
    assert!(printed.contains("farfield.csv") && printed.contains("diagnostics.json"));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "cluster": { "a": "small" }, "contrast": { "cRho": 12, "beta": 2 }, "frequency": { "fixed": { "omega": 9000 } } }"#,
    );
    let o = bubbles(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cluster.a"), "{}", stderr(&o));

    let cfg = write_config(
        dir.path(),
        r#"{ "cluster": { "a": 0.01 }, "contrast": { "cRho": 12, "beta": 2, "bogus": 1 }, "frequency": { "fixed": { "omega": 9000 } } }"#,
    );
    let o = bubbles(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "{ not json");
    let o = bubbles(&["solve", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn infeasible_regime_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "cluster": { "a": 0.05, "s": 1.2, "t": 0.2 }, "contrast": { "cRho": 12, "beta": 2 }, "frequency": { "fixed": { "omega": 9000 } } }"#,
    );
    let o = bubbles(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("geometry: infeasible regime"), "{}", stderr(&o));
}

fn threads_used(extra: &[&str], env: &[(&str, &str)]) -> u64 {
    let out = tempfile::tempdir().unwrap();
    let mut args = vec!["solve", "--config", "", "--out", out.path().to_str().unwrap()];
    let cfg = canned("single_bubble.json");
    args[2] = &cfg;
    args.extend_from_slice(extra);
    let o = bubbles(&args, env);
    assert!(o.status.success(), "{}", stderr(&o));
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("diagnostics.json")).unwrap()).unwrap();
    diag["threads"].as_u64().unwrap()
}

#[test]
fn thread_count_flag_and_environment() {
    assert_eq!(threads_used(&["--threads", "2"], &[]), 2);
    assert_eq!(threads_used(&["--threads", "2"], &[("BUBBLES_THREADS", "3")]), 3);
    assert_eq!(threads_used(&[], &[("BUBBLES_THREADS", "1")]), 1);
}

#[test]
fn every_subcommand_writes_its_files() {
    let cases: [(&str, &str, &[&str]); 6] = [
        ("functionals", "single_bubble.json", &["functionals.csv", "functionals.json"]),
        ("solve", "single_bubble.json", &["q.csv", "diagnostics.json"]),
        ("farfield", "bem_three.json", &["farfield.csv", "farfield.json", "diagnostics.json"]),
        ("oracle", "bem_three.json", &["oracle_farfield.csv", "oracle.json", "diagnostics.json"]),
        ("sweep", "sweep.json", &["sweep.csv", "sweep.json"]),
        ("study", "study_mie.json", &["study.csv", "study.json"]),
    ];
    for (cmd, cfg, files) in cases {
        let out = tempfile::tempdir().unwrap();
        let o = bubbles(&[cmd, "--config", &canned(cfg), "--out", out.path().to_str().unwrap()], &[]);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        for f in files {
            assert!(out.path().join(f).is_file(), "{cmd}: {f} missing");
        }
    }
}

#[test]
fn output_directory_defaults() {
    let cwd = tempfile::tempdir().unwrap();
    let run = |cfg: &str| {
        Command::new(env!("CARGO_BIN_EXE_bubbles"))
            .args(["solve", "--config", cfg])
            .current_dir(cwd.path())
            .env_remove("BUBBLES_THREADS")
            .output()
            .unwrap()
    };
    let o = run(&canned("single_bubble.json"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(cwd.path().join("bubbles-out").join("q.csv").is_file());

    let target = cwd.path().join("chosen");
    let cfg = write_config(
        cwd.path(),
        &format!(
            r#"{{ "cluster": {{ "a": 0.01, "placement": "centered" }}, "contrast": {{ "cRho": 12, "beta": 2 }},
                "frequency": {{ "fixed": {{ "omega": 9000 }} }}, "outputs": {{ "dir": {:?} }} }}"#,
            target.display().to_string()
        ),
    );
    let o = run(&cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("diagnostics.json").is_file());
}
