//! TOML run configuration.

use std::path::{Path, PathBuf};

use nalgebra::Point2;
use serde::Deserialize;

use super::loads::{manufactured_rhs, paper_load};
use crate::beam::{BeamSpec, CrossSection, EndCondition, LineLoad, DEFAULT_BEAM_PENALTY, DEFAULT_ENDPOINT_PENALTY};
use crate::error::HarnessError;
use crate::mesh::{generate_structured_unit_square, load_mesh, Mesh};
use crate::plate::{LoadSpec, PlateBc, PlateSpec, DEFAULT_PLATE_PENALTY};
use crate::solver::{SolveMethod, SolveOptions, DEFAULT_SEED, DEFAULT_TOLERANCE};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mesh: MeshConfig,
    pub plate: PlateConfig,
    #[serde(default)]
    pub load: LoadConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, rename = "beam")]
    pub beams: Vec<BeamConfig>,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Structured `n x n` mesh of the unit square.
    pub n: Option<usize>,
    /// Mesh file, relative to the config file.
    pub file: Option<PathBuf>,
    #[serde(default = "default_degree")]
    pub degree: usize,
}

fn default_degree() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateConfig {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
    pub bc: String,
    pub penalty: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    /// `div div sigma(u*)` for the clamped bubble `u*`.
    #[default]
    Manufactured,
    /// The printed load `8 C_P (...)`; it equals the manufactured load only for `nu = 0`.
    PaperF,
    /// Uniform load `value`.
    Constant,
}

impl LoadKind {
    pub fn name(self) -> &'static str {
        match self {
            LoadKind::Manufactured => "manufactured",
            LoadKind::PaperF => "paper_f",
            LoadKind::Constant => "constant",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    #[serde(default)]
    pub kind: LoadKind,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub max_iterations: Option<usize>,
    /// Random vectors for the positivity diagnostic; 0 skips it.
    #[serde(default = "default_samples")]
    pub positivity_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_method() -> String {
    "direct".into()
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_samples() -> usize {
    100
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: default_method(), tol: default_tol(), max_iterations: None, positivity_samples: default_samples(), seed: DEFAULT_SEED }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Artifact directory, relative to the working directory.
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub youngs_modulus: f64,
    pub width: f64,
    pub thickness: f64,
    /// Condition at both ends unless overridden per end.
    pub ends: Option<String>,
    pub start_condition: Option<String>,
    pub end_condition: Option<String>,
    /// `standard` or `dual_layer`.
    pub cross_section: Option<String>,
    pub penalty: Option<f64>,
    pub endpoint_penalty: Option<f64>,
    pub gamma_faces: Option<f64>,
    pub gamma_elements: Option<f64>,
    /// Uniform load per unit length.
    pub line_load: Option<f64>,
}

fn config_err(m: impl Into<String>) -> HarnessError {
    HarnessError::Config(m.into())
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        match (&self.mesh.n, &self.mesh.file) {
            (Some(0), _) => return Err(config_err("mesh.n must be positive")),
            (Some(_), Some(_)) => return Err(config_err("give either mesh.n or mesh.file, not both")),
            (None, None) => return Err(config_err("mesh needs `n` or `file`")),
            _ => {}
        }
        if self.load.kind == LoadKind::Constant && self.load.value.is_none() {
            return Err(config_err("load.kind = \"constant\" needs load.value"));
        }
        if !(self.solver.tol > 0.0) {
            return Err(config_err("solver.tol must be positive"));
        }
        self.solve_options()?;
        self.plate_spec()?;
        self.beam_specs()?;
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<Mesh, HarnessError> {
        if let Some(n) = self.mesh.n {
            return Ok(generate_structured_unit_square(n));
        }
        let file = self.mesh.file.as_ref().expect("validated mesh source");
        let path = self.base_dir.join(file);
        let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
        Ok(load_mesh(&text)?)
    }

    pub fn plate_spec(&self) -> Result<PlateSpec, HarnessError> {
        let p = &self.plate;
        let bc: PlateBc = p.bc.parse().map_err(|e| config_err(format!("plate.bc: {e}")))?;
        let spec = PlateSpec::new(p.youngs_modulus, p.poisson_ratio, p.thickness, bc)
            .map_err(|e| config_err(e.to_string()))?
            .with_penalty(p.penalty.unwrap_or(DEFAULT_PLATE_PENALTY));
        spec.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }

    pub fn load_spec(&self) -> Result<LoadSpec, HarnessError> {
        let plate = self.plate_spec()?;
        Ok(match self.load.kind {
            LoadKind::Manufactured => manufactured_rhs(&plate),
            LoadKind::PaperF => paper_load(&plate),
            LoadKind::Constant => LoadSpec::constant(self.load.value.expect("validated")),
        })
    }

    pub fn beam_specs(&self) -> Result<Vec<BeamSpec>, HarnessError> {
        let cond = |s: &Option<String>, fallback: EndCondition, what: &str| -> Result<EndCondition, HarnessError> {
            s.as_deref().map_or(Ok(fallback), |s| s.parse().map_err(|e| config_err(format!("{what}: {e}"))))
        };
        self.beams
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let ends = cond(&b.ends, EndCondition::Free, &format!("beam {i} ends"))?;
                let mut spec = BeamSpec::new(Point2::from(b.start), Point2::from(b.end), b.youngs_modulus, b.width, b.thickness);
                spec.start_condition = cond(&b.start_condition, ends, &format!("beam {i} start_condition"))?;
                spec.end_condition = cond(&b.end_condition, ends, &format!("beam {i} end_condition"))?;
                spec.cross_section = match b.cross_section.as_deref() {
                    None | Some("standard") => CrossSection::Standard,
                    Some("dual_layer") => CrossSection::DualLayer { plate_thickness: self.plate.thickness },
                    Some(other) => return Err(config_err(format!("beam {i} cross_section: unknown `{other}`"))),
                };
                spec.penalty = b.penalty.unwrap_or(DEFAULT_BEAM_PENALTY);
                spec.endpoint_penalty = b.endpoint_penalty.unwrap_or(DEFAULT_ENDPOINT_PENALTY);
                spec.gamma_faces = b.gamma_faces.unwrap_or(0.0);
                spec.gamma_elements = b.gamma_elements.unwrap_or(0.0);
                spec.line_load = LineLoad::constant(b.line_load.unwrap_or(0.0));
                spec.validate().map_err(|e| config_err(format!("beam {i}: {e}")))?;
                Ok(spec)
            })
            .collect()
    }

    pub fn solve_options(&self) -> Result<SolveOptions, HarnessError> {
        let method: SolveMethod = self.solver.method.parse().map_err(config_err)?;
        Ok(SolveOptions { method, tol: self.solver.tol, max_iterations: self.solver.max_iterations })
    }

    /// Copy with a structured `n x n` mesh.
    pub fn with_structured(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.mesh.n = Some(n);
        c.mesh.file = None;
        c
    }
}
