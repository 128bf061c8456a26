//! Assembling and solving one configured scenario.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::Point2;

use super::config::{LoadKind, RunConfig};
use super::export::{export_solution_csv, export_vtk, write_text};
use crate::beam::{assemble_beam_load, assemble_beam_operator, beam_energy_matrix, compute_cut_topology, BeamSpec, CutTopology};
use crate::error::HarnessError;
use crate::fem::{ClampedBubble, FeSpace};
use crate::plate::{assemble_plate_form, assemble_plate_load, plate_constraints, plate_energy_matrix, PlateSpec};
use crate::solver::{
    energy_norms, error_norms, positivity_diagnostic, solve, superpose, EnergyNorms, ErrorNorms, LinearSystem, SolveOptions, SolveReport,
};

/// Assembled operators of one run.
pub struct Scenario {
    pub space: FeSpace,
    pub plate: PlateSpec,
    pub beams: Vec<(CutTopology, BeamSpec)>,
    pub system: LinearSystem,
    pub warnings: Vec<String>,
}

impl Scenario {
    /// Matrix of `|||v|||^2_plate + sum |||v|||^2_beam`.
    pub fn energy_matrix(&self) -> Result<crate::sparse::CsrMatrix, HarnessError> {
        let mut m = plate_energy_matrix(&self.space, &self.plate);
        for (cut, spec) in &self.beams {
            m = m.add(&beam_energy_matrix(&self.space, cut, spec)?);
        }
        Ok(m)
    }
}

/// Warning text when the mesh is finer than the plate or beam dimensions.
pub fn thin_structure_warning(h: f64, plate: &PlateSpec, beams: &[BeamSpec]) -> Option<String> {
    let dim = beams.iter().fold(plate.thickness, |m, b| m.max(b.thickness).max(b.width));
    (!beams.is_empty() && h < dim).then(|| {
        format!("mesh size h = {h:.4} is below the largest plate/beam dimension {dim}; stability is only expected for h >= {dim}")
    })
}

pub fn build_scenario(config: &RunConfig) -> Result<Scenario, HarnessError> {
    let mesh = Arc::new(config.build_mesh()?);
    let space = FeSpace::new(mesh, config.mesh.degree)?;
    let plate = config.plate_spec()?;
    let specs = config.beam_specs()?;

    let mut warnings = Vec::new();
    if let Some(w) = thin_structure_warning(space.mesh().mesh_size(), &plate, &specs) {
        log::warn!("{w}");
        warnings.push(w);
    }

    let plate_system = LinearSystem::new(assemble_plate_form(&space, &plate), assemble_plate_load(&space, &config.load_spec()?))?
        .with_homogeneous(plate_constraints(&space, plate.bc))?;
    let mut beams = Vec::with_capacity(specs.len());
    let mut matrices = Vec::with_capacity(specs.len());
    let mut loads = Vec::with_capacity(specs.len());
    for spec in specs {
        let cut = compute_cut_topology(space.mesh(), space.topology(), spec.start, spec.end)?;
        matrices.push(assemble_beam_operator(&space, &cut, &spec)?);
        loads.push(assemble_beam_load(&space, &cut, &spec)?);
        beams.push((cut, spec));
    }
    let system = superpose(&plate_system, &matrices, &loads)?;
    Ok(Scenario { space, plate, beams, system, warnings })
}

pub struct RunResult {
    pub scenario: Scenario,
    pub coeffs: Vec<f64>,
    pub report: SolveReport,
    pub energy: EnergyNorms,
    /// Errors against the bubble, for the manufactured load.
    pub errors: Option<ErrorNorms>,
    /// `max |u|` over the nodal values.
    pub max_deflection: f64,
    pub center_deflection: Option<f64>,
}

pub fn run(config: &RunConfig) -> Result<RunResult, HarnessError> {
    run_with(config, &config.solve_options()?)
}

pub fn run_with(config: &RunConfig, options: &SolveOptions) -> Result<RunResult, HarnessError> {
    let scenario = build_scenario(config)?;
    let (coeffs, mut report) = solve(&scenario.system, options)?;
    if config.solver.positivity_samples > 0 {
        let norm = scenario.energy_matrix()?;
        report.positivity = Some(positivity_diagnostic(&scenario.system, &norm, config.solver.positivity_samples, config.solver.seed));
    }
    let energy = energy_norms(&scenario.space, &scenario.plate, &scenario.beams, &coeffs)?;
    let errors = match config.load.kind {
        LoadKind::Manufactured => Some(error_norms(&scenario.space, &scenario.plate, &coeffs, &ClampedBubble)?),
        _ => None,
    };
    let max_deflection = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let center_deflection = scenario.space.evaluate_field(&coeffs, &Point2::new(0.5, 0.5)).ok().map(|f| f.value);
    Ok(RunResult { scenario, coeffs, report, energy, errors, max_deflection, center_deflection })
}

/// `key = value` lines describing a finished run.
pub fn render_report(config: &RunConfig, result: &RunResult) -> String {
    let r = &result.report;
    let s = &result.scenario;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    kv("triangles", s.space.mesh().num_triangles().to_string());
    kv("mesh_size", s.space.mesh().mesh_size().to_string());
    kv("degree", s.space.degree().to_string());
    kv("dofs", r.num_dofs.to_string());
    kv("free_dofs", r.num_free.to_string());
    kv("plate_bc", s.plate.bc.to_string());
    kv("load", config.load.kind.name().to_string());
    if config.load.kind == LoadKind::PaperF {
        kv("load_note", "printed load; div div sigma(u*) differs from it unless nu = 0".into());
    }
    kv("beams", s.beams.len().to_string());
    kv("solver", r.method.to_string());
    kv("iterations", r.iterations.to_string());
    kv("relative_residual", format!("{:e}", r.relative_residual));
    kv("max_asymmetry", format!("{:e}", r.max_asymmetry));
    if let Some(n) = r.negative_pivots {
        kv("negative_pivots", n.to_string());
    }
    if let Some(p) = r.positivity {
        kv("positivity", format!("{p:e}"));
        kv("positivity_seed", config.solver.seed.to_string());
    }
    kv("wall_time_s", format!("{:.3}", r.wall_time.as_secs_f64()));
    kv("max_deflection", format!("{:e}", result.max_deflection));
    if let Some(c) = result.center_deflection {
        kv("center_deflection", format!("{c:e}"));
    }
    kv("energy_norm_plate", format!("{:e}", result.energy.plate));
    for (i, e) in result.energy.beams.iter().enumerate() {
        kv(&format!("energy_norm_beam_{i}"), format!("{e:e}"));
    }
    if let Some(e) = &result.errors {
        kv("error_l2", format!("{:e}", e.l2));
        kv("error_h1", format!("{:e}", e.h1_seminorm));
        kv("error_energy", format!("{:e}", e.energy));
    }
    for w in &s.warnings {
        kv("warning", w.clone());
    }
    out
}

/// Writes `solution.vtk`, `solution.csv` and `report.txt` into `dir`.
pub fn write_artifacts(config: &RunConfig, result: &RunResult, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.display().to_string(), source })?;
    export_vtk(&result.scenario.space, &result.coeffs, &dir.join("solution.vtk"))?;
    export_solution_csv(&result.scenario.space, &result.coeffs, &dir.join("solution.csv"))?;
    write_text(&dir.join("report.txt"), &render_report(config, result))
}
