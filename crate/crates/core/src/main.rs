use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cutplate::error::HarnessError;
use cutplate::harness::{
    convergence_study, export_csv, parse_n_list, render_report, run_with, standalone_beam_study, write_artifacts, RunConfig,
    STUDY_TOLERANCE,
};
use cutplate::beam::STANDALONE_GAMMA;
use cutplate::solver::{SolveMethod, SolveOptions};

#[derive(Parser)]
#[command(name = "cutplate", version, about = "Kirchhoff-Love plates reinforced by cut Euler-Bernoulli beams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Seed of the positivity diagnostic (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Linear solver (overrides the config).
    #[arg(long, global = true, value_parser = ["direct", "cg"])]
    solver: Option<String>,
    /// Relative residual tolerance (overrides the config).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured scenario and write solution.vtk, solution.csv and report.txt.
    Run {
        config: PathBuf,
        /// Output directory (default: output.dir of the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution refinement study on structured meshes; writes rates.csv.
    Converge {
        config: PathBuf,
        #[arg(long, default_value = "8,16,32,64")]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clamped beam alone under unit load, against the exact midpoint deflection.
    BeamStudy {
        #[arg(long, default_value = "16,32,64")]
        n: String,
        /// Both stabilization weights.
        #[arg(long, default_value_t = STANDALONE_GAMMA)]
        gamma: f64,
        #[arg(long, default_value = "out/beam-study")]
        out: PathBuf,
    },
}

fn load_config(path: &Path, global: &GlobalOpts) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = global.seed {
        cfg.solver.seed = s;
    }
    if let Some(m) = &global.solver {
        cfg.solver.method = m.clone();
    }
    if let Some(t) = global.tol {
        cfg.solver.tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &RunConfig, out: &Option<PathBuf>) -> PathBuf {
    out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.display().to_string(), source })
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config, &cli.global)?;
            let result = run_with(&cfg, &cfg.solve_options()?)?;
            let dir = output_dir(&cfg, &out);
            write_artifacts(&cfg, &result, &dir)?;
            print!("{}", render_report(&cfg, &result));
            println!("output = {}", dir.display());
        }
        Command::Converge { config, n, out } => {
            let cfg = load_config(&config, &cli.global)?;
            let table = convergence_study(&cfg, &parse_n_list(&n)?, &cfg.solve_options()?)?;
            let dir = output_dir(&cfg, &out);
            create_dir(&dir)?;
            export_csv(&table.rows, &dir.join("rates.csv"))?;
            println!("{:>5} {:>10} {:>12} {:>12} {:>8} {:>8}", "n", "h", "L2", "energy", "rate_L2", "rate_E");
            for r in &table.rows {
                let rate = |v: Option<f64>| v.map_or(String::from("-"), |v| format!("{v:.3}"));
                println!("{:>5} {:>10.5} {:>12.4e} {:>12.4e} {:>8} {:>8}", r.n, r.h, r.l2, r.energy, rate(r.rate_l2), rate(r.rate_energy));
            }
            println!("output = {}", dir.join("rates.csv").display());
        }
        Command::BeamStudy { n, gamma, out } => {
            let method: SolveMethod = cli.global.solver.as_deref().unwrap_or("direct").parse().map_err(HarnessError::Config)?;
            let options = SolveOptions { method, tol: cli.global.tol.unwrap_or(STUDY_TOLERANCE), max_iterations: None };
            let rows = standalone_beam_study(&parse_n_list(&n)?, gamma, &options)?;
            create_dir(&out)?;
            export_csv(&rows, &out.join("rates.csv"))?;
            println!("{:>5} {:>14} {:>14} {:>10}", "n", "deflection", "exact", "rel_err");
            for r in &rows {
                println!("{:>5} {:>14.6e} {:>14.6e} {:>10.3e}", r.n, r.deflection, r.exact, r.relative_error);
            }
            println!("output = {}", out.join("rates.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
