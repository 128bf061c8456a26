use std::path::PathBuf;

use cutplate::harness::{convergence_study, run, write_artifacts, RunConfig, STUDY_TOLERANCE};
use cutplate::solver::{SolveMethod, SolveOptions};
use nalgebra::Point2;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> RunConfig {
    RunConfig::load(&configs_dir().join(format!("{name}.toml"))).unwrap()
}

fn study_options() -> SolveOptions {
    SolveOptions { method: SolveMethod::Direct, tol: STUDY_TOLERANCE, max_iterations: None }
}

#[test]
fn every_shipped_config_solves() {
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    names.sort();
    assert!(names.len() >= 9);
    for path in names {
        let cfg = RunConfig::load(&path).unwrap();
        let r = run(&cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(r.report.relative_residual <= cfg.solver.tol);
        assert_eq!(r.report.negative_pivots, Some(0), "{}", path.display());
        assert!(r.scenario.warnings.is_empty() || path.to_string_lossy().contains("four_beams"), "{:?}", r.scenario.warnings);
    }
}

#[test]
fn cross_scenario_is_mirror_symmetric() {
    for name in ["cross_ss_e1000", "cross_clamped_e100"] {
        let r = run(&config(name)).unwrap();
        let space = &r.scenario.space;
        let mut worst = 0.0f64;
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (0.01 + 0.049 * i as f64, 0.02 + 0.048 * j as f64);
                let a = space.evaluate_field(&r.coeffs, &Point2::new(x, y)).unwrap().value;
                let b = space.evaluate_field(&r.coeffs, &Point2::new(y, x)).unwrap().value;
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst <= 1e-8 * r.max_deflection, "{name}: {worst:e}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let cfg = config("four_beams_clamped_at_x1");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        write_artifacts(&cfg, &run(&cfg).unwrap(), d.path()).unwrap();
    }
    for file in ["solution.csv", "solution.vtk"] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        assert!(!a.is_empty() && a == b, "{file}");
    }
}

#[test]
fn convergence_errors_decrease() {
    let table = convergence_study(&config("convergence"), &[8, 16, 32, 64], &study_options()).unwrap();
    for w in table.rows.windows(2) {
        assert!(w[1].l2 < w[0].l2 && w[1].energy < w[0].energy && w[1].h1 < w[0].h1);
    }
}

// The c/dG P2 error is O(h^2) in L2 while the interpolation error is O(h^3),
// so their ratio grows like 1/h (about 860 at n = 64).
#[test]
#[ignore = "not attainable for k = 2: L2 error O(h^2) against interpolation O(h^3)"]
fn l2_error_within_ten_times_interpolation_error() {
    let table = convergence_study(&config("convergence"), &[8, 16, 32, 64], &study_options()).unwrap();
    let last = table.last().unwrap();
    assert!(last.l2 <= 10.0 * last.interpolation_l2, "{} vs {}", last.l2, last.interpolation_l2);
}
