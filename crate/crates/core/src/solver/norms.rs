use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LinearSystem;
use crate::assembly::face_points;
use crate::beam::{beam_energy_matrix, BeamSpec, CutTopology};
use crate::error::{BeamError, FemError};
use crate::fem::{space::combine, triangle_rule, AnalyticField, FeSpace};
use crate::plate::{faces_in_form, plate_constant, plate_energy_matrix, PlateSpec, LOAD_QUADRATURE_DEGREE};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyNorms {
    pub plate: f64,
    pub beams: Vec<f64>,
}

/// Plate and per-beam energy norms of the discrete field `coeffs`.
pub fn energy_norms(
    space: &FeSpace,
    plate: &PlateSpec,
    beams: &[(CutTopology, BeamSpec)],
    coeffs: &[f64],
) -> Result<EnergyNorms, BeamError> {
    let sq = |m: &CsrMatrix| m.quad_form(coeffs).max(0.0).sqrt();
    let plate_norm = sq(&plate_energy_matrix(space, plate));
    let beams = beams
        .iter()
        .map(|(cut, spec)| beam_energy_matrix(space, cut, spec).map(|m| sq(&m)))
        .collect::<Result<_, _>>()?;
    Ok(EnergyNorms { plate: plate_norm, beams })
}

/// Minimum of `v^T A v / v^T N v` over `samples` random vectors with the
/// constrained entries zeroed, where `N` is the energy-norm matrix.
pub fn positivity_diagnostic(system: &LinearSystem, norm: &CsrMatrix, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..samples {
        let mut v: Vec<f64> = (0..system.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for &d in system.constraints.keys() {
            v[d] = 0.0;
        }
        let den = norm.quad_form(&v);
        if den > 0.0 {
            min = min.min(system.matrix.quad_form(&v) / den);
        }
    }
    min
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_seminorm: f64,
    /// Plate energy norm of `u_h - u`.
    pub energy: f64,
}

/// Errors of the discrete field against an analytic solution, with the
/// analytic derivatives evaluated exactly at the quadrature points.
pub fn error_norms(space: &FeSpace, plate: &PlateSpec, coeffs: &[f64], exact: &dyn AnalyticField) -> Result<ErrorNorms, FemError> {
    space.check_len(coeffs)?;
    let cp = plate_constant(plate);
    let rule = triangle_rule(LOAD_QUADRATURE_DEGREE)?;
    let (mut l2, mut h1, mut energy) = (0.0, 0.0, 0.0);
    for t in 0..space.mesh().num_triangles() {
        let map = space.affine(t);
        for (xi, w) in rule.iter() {
            let x = map.to_physical(*xi);
            let uh = combine(&space.eval_reference(t, *xi), space.element_dofs(t), coeffs);
            let wd = w * map.det;
            l2 += wd * (uh.value - exact.value(&x)).powi(2);
            h1 += wd * (uh.gradient - exact.gradient(&x)).norm_squared();
            energy += wd * cp * (uh.hessian - exact.hessian(&x)).norm_squared();
        }
    }
    for face in faces_in_form(space, plate.bc) {
        for (x, w) in face_points(space, face, LOAD_QUADRATURE_DEGREE) {
            let plus = space.evaluate_in(face.plus, coeffs, &x);
            let (jump, avg): (Vector2<f64>, Matrix2<f64>) = match face.minus {
                Some(m) => {
                    let minus = space.evaluate_in(m, coeffs, &x);
                    (plus.gradient - minus.gradient, (plus.hessian + minus.hessian) * 0.5 - exact.hessian(&x))
                }
                None => (plus.gradient - exact.gradient(&x), plus.hessian - exact.hessian(&x)),
            };
            energy += w * cp * (face.h * avg.norm_squared() + jump.norm_squared() / face.h);
        }
    }
    Ok(ErrorNorms { l2: l2.sqrt(), h1_seminorm: h1.sqrt(), energy: energy.sqrt() })
}
