//! Refinement studies.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use super::config::{LoadKind, RunConfig};
use super::run::run_with;
use crate::beam::{assemble_beam_load, assemble_beam_operator, compute_cut_topology, BeamSpec, EndCondition, LineLoad};
use crate::error::HarnessError;
use crate::fem::{AnalyticField, ClampedBubble, FeSpace};
use crate::mesh::generate_structured_unit_square;
use crate::plate::PlateBc;
use crate::solver::{error_norms, solve, LinearSystem, SolveOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub h: f64,
    pub l2: f64,
    pub h1: f64,
    pub energy: f64,
    /// L2 error of the nodal interpolant of the exact solution.
    pub interpolation_l2: f64,
    pub rate_l2: Option<f64>,
    pub rate_energy: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

/// `ln(e_prev / e) / ln(h_prev / h)`, which is `log2(e_prev / e)` when `h` halves.
pub fn observed_rate(e_prev: f64, e: f64, h_prev: f64, h: f64) -> f64 {
    (e_prev / e).ln() / (h_prev / h).ln()
}

impl RateTable {
    pub fn from_errors(errors: Vec<(usize, f64, f64, f64, f64, f64)>) -> Self {
        let mut rows: Vec<RateRow> = Vec::with_capacity(errors.len());
        for (n, h, l2, h1, energy, interpolation_l2) in errors {
            let (rate_l2, rate_energy) = match rows.last() {
                Some(p) => (Some(observed_rate(p.l2, l2, p.h, h)), Some(observed_rate(p.energy, energy, p.h, h))),
                None => (None, None),
            };
            rows.push(RateRow { n, h, l2, h1, energy, interpolation_l2, rate_l2, rate_energy });
        }
        Self { rows }
    }

    pub fn last(&self) -> Option<&RateRow> {
        self.rows.last()
    }
}

/// Clamped plate with the manufactured load on structured `n x n` meshes.
pub fn convergence_study(config: &RunConfig, n_list: &[usize], options: &SolveOptions) -> Result<RateTable, HarnessError> {
    if config.load.kind != LoadKind::Manufactured {
        return Err(HarnessError::Config("convergence study needs load.kind = \"manufactured\"".into()));
    }
    if config.plate_spec()?.bc != PlateBc::Clamped {
        return Err(HarnessError::Config("convergence study needs plate.bc = \"clamped\"".into()));
    }
    if !config.beams.is_empty() {
        return Err(HarnessError::Config("convergence study compares against the plate-only exact solution; remove the beams".into()));
    }
    let mut errors = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut cfg = config.with_structured(n);
        cfg.solver.positivity_samples = 0;
        let result = run_with(&cfg, options)?;
        let e = result.errors.expect("manufactured load has errors");
        let space = &result.scenario.space;
        let interp = space.interpolate(|x, y| ClampedBubble.value(&Point2::new(x, y)));
        let ie = error_norms(space, &result.scenario.plate, &interp, &ClampedBubble)?;
        log::info!("n = {n}: L2 {:e}, energy {:e}", e.l2, e.energy);
        errors.push((n, space.mesh().mesh_size(), e.l2, e.h1_seminorm, e.energy, ie.l2));
    }
    Ok(RateTable::from_errors(errors))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamStudyRow {
    pub n: usize,
    pub h: f64,
    pub deflection: f64,
    pub exact: f64,
    pub relative_error: f64,
}

/// Residual tolerance of the studies: the finest meshes have a round-off
/// floor of a few 1e-9.
pub const STUDY_TOLERANCE: f64 = 1e-8;

/// Beam of the standalone study: along `x = 0.499` across the unit square.
pub fn standalone_beam(gamma: f64) -> BeamSpec {
    let mut b = BeamSpec::new(Point2::new(0.499, 0.0), Point2::new(0.499, 1.0), 1.0e4, 0.1, 0.1)
        .with_ends(EndCondition::Clamped)
        .with_stabilization(gamma, gamma);
    let area = b.width * b.thickness;
    // a f = 1
    b.line_load = LineLoad::constant(1.0 / area);
    b
}

/// Midpoint deflection of the clamped beam alone on an `n x n` mesh; DOFs
/// off the active elements are fixed to zero.
pub fn standalone_beam_deflection(n: usize, gamma: f64, options: &SolveOptions) -> Result<BeamStudyRow, HarnessError> {
    let space = FeSpace::new(Arc::new(generate_structured_unit_square(n)), 2)?;
    let spec = standalone_beam(gamma);
    let cut = compute_cut_topology(space.mesh(), space.topology(), spec.start, spec.end)?;
    let matrix = assemble_beam_operator(&space, &cut, &spec)?;
    let rhs = assemble_beam_load(&space, &cut, &spec)?;
    let mut active = vec![false; space.num_dofs()];
    for s in &cut.segments {
        for &d in space.element_dofs(s.element) {
            active[d] = true;
        }
    }
    let system = LinearSystem::new(matrix, rhs)?.with_homogeneous((0..space.num_dofs()).filter(|&d| !active[d]))?;
    let (u, _) = solve(&system, options)?;
    let mid = cut.point_at(0.5);
    let deflection = space.evaluate_field(&u, &mid)?.value;
    let exact = 1.0 / (384.0 * spec.constants()?.stiffness) * cut.length.powi(4);
    Ok(BeamStudyRow { n, h: space.mesh().mesh_size(), deflection, exact, relative_error: (deflection - exact).abs() / exact })
}

pub fn standalone_beam_study(n_list: &[usize], gamma: f64, options: &SolveOptions) -> Result<Vec<BeamStudyRow>, HarnessError> {
    n_list.iter().map(|&n| standalone_beam_deflection(n, gamma, options)).collect()
}

/// Parses `8,16,32` into a sorted, deduplicated list.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, HarnessError> {
    let mut set = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let n: usize = part.parse().map_err(|e| HarnessError::Config(format!("bad mesh size `{part}`: {e}")))?;
        if n == 0 {
            return Err(HarnessError::Config("mesh sizes must be positive".into()));
        }
        set.insert(n, ());
    }
    if set.is_empty() {
        return Err(HarnessError::Config("empty mesh size list".into()));
    }
    Ok(set.into_keys().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::export::{export_csv, read_csv};
    use approx::assert_relative_eq;

    #[test]
    fn single_row_has_no_rates() {
        let t = RateTable::from_errors(vec![(8, 0.1, 1.0, 1.0, 1.0, 0.5)]);
        assert_eq!(t.rows[0].rate_l2, None);
        let t = RateTable::from_errors(vec![(8, 0.2, 4.0, 1.0, 2.0, 0.5), (16, 0.1, 1.0, 1.0, 1.0, 0.5)]);
        assert_relative_eq!(t.rows[1].rate_l2.unwrap(), 2.0);
        assert_relative_eq!(t.rows[1].rate_energy.unwrap(), 1.0);
    }

    #[test]
    fn rate_table_csv_round_trip() {
        let t = RateTable::from_errors(vec![(8, 0.17, 1.3e-4, 2e-3, 0.1, 3e-5), (16, 0.085, 3.1e-5, 1e-3, 0.051, 4e-6)]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rates.csv");
        export_csv(&t.rows, &path).unwrap();
        let back: Vec<RateRow> = read_csv(&path).unwrap();
        assert_eq!(RateTable { rows: back }, t);
    }

    #[test]
    fn exact_beam_solution() {
        // u(s) = s^2 (1 - s)^2 / (24 C_B) solves C_B u'''' = 1 with clamped ends
        let cb = 0.37;
        let u = |s: f64| s * s * (1.0 - s).powi(2) / (24.0 * cb);
        let du = |s: f64| (2.0 * s - 6.0 * s * s + 4.0 * s.powi(3)) / (24.0 * cb);
        let d4 = 24.0 / (24.0 * cb);
        assert_relative_eq!(cb * d4, 1.0);
        assert_eq!((u(0.0), u(1.0), du(0.0), du(1.0)), (0.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(u(0.5), 1.0 / (384.0 * cb), max_relative = 1e-14);
    }

    #[test]
    fn n_list_parsing() {
        assert_eq!(parse_n_list("16, 8,32,8").unwrap(), vec![8, 16, 32]);
        assert!(parse_n_list("8,x").is_err());
        assert!(parse_n_list("").is_err());
    }
}
