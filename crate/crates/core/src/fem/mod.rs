//! Lagrange finite element spaces and quadrature.

pub mod analytic;
pub mod quadrature;
pub mod reference;
pub mod space;

pub use analytic::{AnalyticField, ClampedBubble, Quadratic};
pub use quadrature::{segment_rule, triangle_rule, QuadratureRule, SegmentRule, TriangleRule};
pub use reference::{BasisValues, ReferenceElement};
pub use space::{AffineMap, FeSpace, FieldValue};
