use std::path::{Path, PathBuf};
use std::process::Command;

fn cutplate() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutplate"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(cutplate().args(["run", "--seed", "3"]).arg(config("cross_ss_e100.toml")).arg("--out").arg(dir.path()));
    assert!(text.contains("positivity_seed = 3"));
    for f in ["solution.vtk", "solution.csv", "report.txt"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("max_deflection = "));
}

#[test]
fn cg_override_agrees_with_direct() {
    let value = |text: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with("max_deflection = ")).unwrap();
        line["max_deflection = ".len()..].parse().unwrap()
    };
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("cross_plate_only.toml");
    let direct = value(&stdout_of(cutplate().arg("run").arg(&cfg).arg("--out").arg(dir.path())));
    let cg = value(&stdout_of(cutplate().args(["run", "--solver", "cg", "--tol", "1e-12"]).arg(&cfg).arg("--out").arg(dir.path())));
    assert!((direct - cg).abs() <= 1e-8 * direct.abs());
}

#[test]
fn converge_and_beam_study_write_rates() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout_of(cutplate().arg("converge").arg(config("convergence.toml")).args(["--n", "4,8"]).arg("--out").arg(dir.path()));
    assert!(text.contains("rate_L2"));
    assert_eq!(std::fs::read_to_string(dir.path().join("rates.csv")).unwrap().lines().count(), 3);

    let beam = dir.path().join("beam");
    stdout_of(cutplate().args(["beam-study", "--n", "8,16"]).arg("--out").arg(&beam));
    let rates = std::fs::read_to_string(beam.join("rates.csv")).unwrap();
    assert!(rates.starts_with("n,h,deflection,exact,relative_error\n") && rates.lines().count() == 3);
}

#[test]
fn bad_input_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[mesh]\nn = 4\n[plate]\nyoungs_modulus = 1.0\npoisson_ratio = 0.3\nthickness = 0.1\nbc = \"clamped\"\ncolour = 1\n").unwrap();
    for args in [vec![bad.as_os_str()], vec![Path::new("missing.toml").as_os_str()]] {
        let out = cutplate().arg("run").args(args).output().unwrap();
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}
