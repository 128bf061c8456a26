//! Configured runs, refinement studies and output files behind the
//! `cutplate` binary.

pub mod config;
pub mod export;
pub mod loads;
pub mod run;
pub mod study;

pub use config::{LoadKind, RunConfig};
pub use export::{export_csv, export_solution_csv, export_vtk, read_csv, render_vtk};
pub use loads::{manufactured_rhs, paper_load};
pub use run::{build_scenario, render_report, run, run_with, thin_structure_warning, write_artifacts, RunResult, Scenario};
pub use study::{
    convergence_study, parse_n_list, standalone_beam, standalone_beam_deflection, standalone_beam_study, BeamStudyRow, STUDY_TOLERANCE, RateRow, RateTable,
};
