//! Plate loads of the manufactured solution.

use crate::fem::ClampedBubble;
use crate::plate::{plate_constant, LoadSpec, PlateSpec};

fn g(x: f64) -> f64 {
    x * x * (1.0 - x) * (1.0 - x)
}

/// `f = div div sigma(hess u*) = C_P / (1 - nu) * bilaplacian(u*)` for
/// `u* = x^2 (1 - x)^2 y^2 (1 - y)^2`.
pub fn manufactured_rhs(spec: &PlateSpec) -> LoadSpec {
    let c = plate_constant(spec) / (1.0 - spec.poisson_ratio);
    LoadSpec::new(move |x, y| c * ClampedBubble.bilaplacian(x, y))
}

/// `8 C_P (3 (g(x) + g(y)) + (1 - 6x(1 - x)) (1 - 6y(1 - y)))`, the load
/// as printed with the bubble. It is `C_P bilaplacian(u*)`, so it is only
/// consistent with `u*` when `nu = 0`.
pub fn paper_load(spec: &PlateSpec) -> LoadSpec {
    let cp = plate_constant(spec);
    LoadSpec::new(move |x, y| 8.0 * cp * (3.0 * (g(x) + g(y)) + (1.0 - 6.0 * x * (1.0 - x)) * (1.0 - 6.0 * y * (1.0 - y))))
}
