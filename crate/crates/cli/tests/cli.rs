use std::path::Path;
use std::process::Command;

fn cpi(dir: &Path, args: &[&str]) -> (i32, serde_json::Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_cpi"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs");
    let summary = std::fs::read_to_string(dir.join("summary.json")).unwrap_or_else(|_| "null".into());
    (status.status.code().unwrap(), serde_json::from_str(&summary).unwrap())
}

#[test]
fn verify_superspace_passes_with_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = cpi(dir.path(), &["verify", "--suite", "superspace"]);
    assert_eq!(code, 0);
    assert_eq!(s["schema_version"], 1);
    let checks = s["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["check"].as_str().unwrap().starts_with("lattice_berezin_reduction")));
    assert!(checks.iter().all(|c| c["residual"] == 0.0));
}

#[test]
fn evolve_trajectory_has_unit_determinant() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = cpi(dir.path(), &["evolve", "--model", "pendulum", "--q", "0.1", "--p", "0", "--T", "100"]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("trajectory_pendulum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,q,p,lambda_q,lambda_p,J11,J12,J21,J22,detJ");
    for l in lines {
        let det: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!((det - 1.0).abs() < 1e-8);
    }
}

#[test]
fn slice_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = cpi(dir.path(), &["quantum", "--model", "ho", "--sweep", "N"]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("convergence_ho.csv")).unwrap();
    let errs: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = cpi(dir.path(), &["--tolerance-scale", "1e-30", "evolve", "--model", "quartic", "--T", "1"]);
    assert_eq!(code, 1);
    assert_eq!(s["status"], "fail");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[span]\nduration = 3.0\n").unwrap();
    let (code, _) = cpi(dir.path(), &["--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);

    let (code, s) = cpi(dir.path(), &["liouville", "--grid", "32", "--strata", "4"]);
    assert_eq!(code, 2, "ensemble without a seed");
    assert_eq!(s["status"], "error");
}

#[test]
fn liouville_plot_has_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = cpi(
        dir.path(),
        &["--seed", "5", "liouville", "--model", "ho", "--grid", "32", "--sigma", "0.3", "--strata", "20", "--T", "0.5"],
    );
    assert!(code == 0 || code == 1);
    let dat = std::fs::read_to_string(dir.path().join("distribution_ho.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 32 * 32);
    assert!(dat.lines().nth(1).unwrap().contains("config sha256"));
}

#[test]
fn same_seed_same_summary() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "9", "liouville", "--model", "pendulum", "--grid", "64", "--sigma", "0.2", "--strata", "30"];
    cpi(a.path(), &args);
    cpi(b.path(), &args);
    let sa = std::fs::read(a.path().join("summary.json")).unwrap();
    let sb = std::fs::read(b.path().join("summary.json")).unwrap();
    assert_eq!(sa, sb);
}
