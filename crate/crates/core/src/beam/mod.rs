//! Euler-Bernoulli beams embedded in the plate mesh.
//!
//! A beam is a straight segment that may cut through elements arbitrarily.
//! Its displacement is the trace of the plate space on the elements it
//! crosses; [`cut`] computes that geometry and [`form`] assembles the beam
//! operators on top of it.

pub mod cut;
pub mod form;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Point2;

use crate::error::BeamError;

pub use cut::{compute_cut_topology, CutTopology, IntersectionPoint, SubSegment};
pub use form::{
    assemble_beam_endpoint_terms, assemble_beam_form, assemble_beam_form_tensor, assemble_beam_load,
    assemble_beam_operator, assemble_beam_stabilization, beam_energy_matrix,
};

pub const DEFAULT_BEAM_PENALTY: f64 = 16.0;
pub const DEFAULT_ENDPOINT_PENALTY: f64 = 100.0;
/// Stabilization weights used when a beam is solved without a plate.
pub const STANDALONE_GAMMA: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrossSection {
    /// Rectangle `b x t` centred on the plate mid-plane.
    Standard,
    /// Rib of total height `t` of which the plate occupies `plate_thickness`.
    DualLayer { plate_thickness: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EndCondition {
    Free,
    SimplySupported,
    Clamped,
}

impl FromStr for EndCondition {
    type Err = BeamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(EndCondition::Free),
            "simply_supported" => Ok(EndCondition::SimplySupported),
            "clamped" => Ok(EndCondition::Clamped),
            other => Err(BeamError::Invalid(format!("unknown end condition `{other}`"))),
        }
    }
}

impl fmt::Display for EndCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndCondition::Free => "free",
            EndCondition::SimplySupported => "simply_supported",
            EndCondition::Clamped => "clamped",
        })
    }
}

/// Load per unit length as a function of arc length from the start point.
#[derive(Clone)]
pub struct LineLoad(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl LineLoad {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.0)(s)
    }
}

impl fmt::Debug for LineLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("LineLoad(..)")
    }
}

#[derive(Clone, Debug)]
pub struct BeamSpec {
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    pub youngs_modulus: f64,
    pub width: f64,
    pub thickness: f64,
    pub cross_section: CrossSection,
    pub start_condition: EndCondition,
    pub end_condition: EndCondition,
    /// `beta_0` of the point penalty `beta_0 C_B / h`.
    pub penalty: f64,
    /// Endpoint displacement penalty `beta~_0`.
    pub endpoint_penalty: f64,
    /// Face-jump stabilization weight.
    pub gamma_faces: f64,
    /// Element normal-derivative stabilization weight.
    pub gamma_elements: f64,
    pub line_load: LineLoad,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamConstants {
    /// Cross-section area `a`.
    pub area: f64,
    /// Second moment of area `I`.
    pub inertia: f64,
    /// Bending stiffness `C_B = E I`.
    pub stiffness: f64,
}

impl BeamSpec {
    /// Beam with free ends, default penalties, no stabilization and no load.
    pub fn new(start: Point2<f64>, end: Point2<f64>, youngs_modulus: f64, width: f64, thickness: f64) -> Self {
        Self {
            start,
            end,
            youngs_modulus,
            width,
            thickness,
            cross_section: CrossSection::Standard,
            start_condition: EndCondition::Free,
            end_condition: EndCondition::Free,
            penalty: DEFAULT_BEAM_PENALTY,
            endpoint_penalty: DEFAULT_ENDPOINT_PENALTY,
            gamma_faces: 0.0,
            gamma_elements: 0.0,
            line_load: LineLoad::constant(0.0),
        }
    }

    pub fn with_ends(mut self, condition: EndCondition) -> Self {
        self.start_condition = condition;
        self.end_condition = condition;
        self
    }

    pub fn with_stabilization(mut self, gamma_faces: f64, gamma_elements: f64) -> Self {
        self.gamma_faces = gamma_faces;
        self.gamma_elements = gamma_elements;
        self
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Checks the descriptor. A zero Young's modulus is accepted and
    /// contributes nothing.
    pub fn validate(&self) -> Result<(), BeamError> {
        let bad = |m: String| Err(BeamError::Invalid(m));
        if !(self.length() > 0.0) {
            return bad("beam start and end points coincide".into());
        }
        if !(self.youngs_modulus >= 0.0) {
            return bad(format!("beam Young's modulus must be nonnegative, got {}", self.youngs_modulus));
        }
        if !(self.width > 0.0 && self.thickness > 0.0) {
            return bad(format!("beam width and thickness must be positive, got {} and {}", self.width, self.thickness));
        }
        if let CrossSection::DualLayer { plate_thickness } = self.cross_section {
            if !(self.thickness > plate_thickness) {
                return bad(format!(
                    "dual-layer section needs beam thickness {} > plate thickness {plate_thickness}",
                    self.thickness
                ));
            }
        }
        for (name, v) in [
            ("penalty", self.penalty),
            ("endpoint_penalty", self.endpoint_penalty),
            ("gamma_faces", self.gamma_faces),
            ("gamma_elements", self.gamma_elements),
        ] {
            if !(v >= 0.0) {
                return bad(format!("beam {name} must be nonnegative, got {v}"));
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<BeamConstants, BeamError> {
        beam_constants(self)
    }
}

pub fn beam_constants(spec: &BeamSpec) -> Result<BeamConstants, BeamError> {
    spec.validate()?;
    let (b, t) = (spec.width, spec.thickness);
    let (area, inertia) = match spec.cross_section {
        CrossSection::Standard => (b * t, b * t.powi(3) / 12.0),
        CrossSection::DualLayer { plate_thickness: tp } => (b * (t - tp), b * (t.powi(3) - tp.powi(3)) / 12.0),
    };
    Ok(BeamConstants { area, inertia, stiffness: spec.youngs_modulus * inertia })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn beam(e: f64, b: f64, t: f64) -> BeamSpec {
        BeamSpec::new(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5), e, b, t)
    }

    #[test]
    fn standard_section() {
        let c = beam_constants(&beam(1e4, 0.1, 0.1)).unwrap();
        assert_relative_eq!(c.inertia, 1e-4 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(c.stiffness, 1.0 / 12.0, max_relative = 1e-14);
        assert_relative_eq!(c.area, 0.01, max_relative = 1e-14);
        assert_relative_eq!(beam_constants(&beam(1.0, 12.0, 1.0)).unwrap().inertia, 1.0);
    }

    #[test]
    fn dual_layer_section() {
        let mut s = beam(1.0, 0.1, 0.2);
        s.cross_section = CrossSection::DualLayer { plate_thickness: 0.1 };
        let c = beam_constants(&s).unwrap();
        assert_relative_eq!(c.area, 0.01, max_relative = 1e-14);
        assert_relative_eq!(c.inertia, 0.1 * 0.007 / 12.0, max_relative = 1e-14);
        s.thickness = 0.1;
        assert!(beam_constants(&s).is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut s = beam(1.0, 0.1, 0.1);
        s.end = s.start;
        assert!(s.validate().is_err());
        assert!(beam(-1.0, 0.1, 0.1).validate().is_err());
        assert!(beam(1.0, 0.0, 0.1).validate().is_err());
        assert!(beam(0.0, 0.1, 0.1).validate().is_ok());
        assert!("pinned".parse::<EndCondition>().is_err());
    }
}
