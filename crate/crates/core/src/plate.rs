//! Kirchhoff-Love plate: material law, the c/dG bilinear form, load vector
//! and boundary conditions.
//!
//! The discrete form is
//!
//! ```text
//! a_h(v, w) = sum_T (sigma(v), hess w)_T
//!           - sum_F (<n . sigma(v)>, [grad w])_F - sum_F ([grad v], <n . sigma(w)>)_F
//!           + sum_F beta / h_F ([grad v], [grad w])_F
//! ```
//!
//! with `sigma(v) = C_P (hess v + nu / (1 - nu) tr(hess v) I)` and
//! `beta = beta_0 C_P`. Face sums run over interior faces, plus boundary faces
//! for a clamped plate where the jump and average are one-sided.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::assembly::{face_points, union_dofs, LocalMatrix};
use crate::error::SpecError;
use crate::fem::{triangle_rule, AnalyticField, BasisValues, FeSpace};
use crate::mesh::Face;
use crate::sparse::{CsrMatrix, TripletBuilder};

pub const DEFAULT_PLATE_PENALTY: f64 = 16.0;

/// Quadrature exactness used for loads and error integrals.
pub const LOAD_QUADRATURE_DEGREE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlateBc {
    Clamped,
    SimplySupported,
    Free,
}

impl PlateBc {
    /// Whether boundary faces carry the Nitsche rotation terms.
    pub fn weak_rotation(self) -> bool {
        matches!(self, PlateBc::Clamped)
    }

    /// Whether boundary displacements are fixed to zero.
    pub fn fixes_displacement(self) -> bool {
        !matches!(self, PlateBc::Free)
    }
}

impl FromStr for PlateBc {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamped" => Ok(PlateBc::Clamped),
            "simply_supported" => Ok(PlateBc::SimplySupported),
            "free" => Ok(PlateBc::Free),
            other => Err(SpecError(format!("unknown plate boundary condition `{other}`"))),
        }
    }
}

impl fmt::Display for PlateBc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlateBc::Clamped => "clamped",
            PlateBc::SimplySupported => "simply_supported",
            PlateBc::Free => "free",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlateSpec {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
    pub bc: PlateBc,
    /// Dimensionless penalty `beta_0`; the face penalty is `beta_0 C_P`.
    pub penalty: f64,
}

impl PlateSpec {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, thickness: f64, bc: PlateBc) -> Result<Self, SpecError> {
        let spec = Self { youngs_modulus, poisson_ratio, thickness, bc, penalty: DEFAULT_PLATE_PENALTY };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_penalty(mut self, penalty: f64) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.youngs_modulus > 0.0) {
            return Err(SpecError(format!("plate Young's modulus must be positive, got {}", self.youngs_modulus)));
        }
        if !(0.0..=0.5).contains(&self.poisson_ratio) {
            return Err(SpecError(format!("plate Poisson ratio must lie in [0, 0.5], got {}", self.poisson_ratio)));
        }
        if !(self.thickness > 0.0) {
            return Err(SpecError(format!("plate thickness must be positive, got {}", self.thickness)));
        }
        if !(self.penalty >= 0.0) {
            return Err(SpecError(format!("plate penalty must be nonnegative, got {}", self.penalty)));
        }
        Ok(())
    }

    /// `C_P = E t^3 / (12 (1 + nu))`.
    pub fn plate_constant(&self) -> f64 {
        plate_constant(self)
    }
}

pub fn plate_constant(spec: &PlateSpec) -> f64 {
    spec.youngs_modulus * spec.thickness.powi(3) / (12.0 * (1.0 + spec.poisson_ratio))
}

/// Moment tensor `C_P (H + nu / (1 - nu) tr(H) I)` for a curvature tensor `H`.
pub fn plate_stress(hessian: &Matrix2<f64>, spec: &PlateSpec) -> Matrix2<f64> {
    let nu = spec.poisson_ratio;
    (hessian + Matrix2::identity() * (nu / (1.0 - nu) * hessian.trace())) * plate_constant(spec)
}

/// Transverse load per unit area.
#[derive(Clone)]
pub struct LoadSpec {
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl LoadSpec {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }
}

impl fmt::Debug for LoadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("LoadSpec(..)")
    }
}

fn moment_contraction(a: &Matrix2<f64>, b: &Matrix2<f64>, poisson_factor: f64) -> f64 {
    a.dot(b) + poisson_factor * a.trace() * b.trace()
}

pub(crate) fn faces_in_form(space: &FeSpace, bc: PlateBc) -> impl Iterator<Item = &Face> {
    space.topology().faces().iter().filter(move |f| !f.is_boundary() || bc.weak_rotation())
}

/// Per-DOF gradient jump and averaged quantity at one face point.
struct FaceTrace {
    dofs: Vec<usize>,
    jumps: Vec<Vector2<f64>>,
    hessian_avg: Vec<Matrix2<f64>>,
}

fn face_trace(space: &FeSpace, face: &Face, x: &nalgebra::Point2<f64>) -> FaceTrace {
    let plus = space.eval_at(face.plus, x);
    let plus_dofs = space.element_dofs(face.plus);
    match face.minus {
        None => FaceTrace { dofs: plus_dofs.to_vec(), jumps: plus.gradients, hessian_avg: plus.hessians },
        Some(m) => {
            let minus = space.eval_at(m, x);
            let (dofs, pos) = union_dofs(plus_dofs, space.element_dofs(m));
            let mut jumps = vec![Vector2::zeros(); dofs.len()];
            let mut hessian_avg = vec![Matrix2::zeros(); dofs.len()];
            for i in 0..plus.len() {
                jumps[i] += plus.gradients[i];
                hessian_avg[i] += plus.hessians[i] * 0.5;
            }
            for (i, &p) in pos.iter().enumerate() {
                jumps[p] -= minus.gradients[i];
                hessian_avg[p] += minus.hessians[i] * 0.5;
            }
            FaceTrace { dofs, jumps, hessian_avg }
        }
    }
}

fn face_dofs(space: &FeSpace, face: &Face) -> Vec<usize> {
    match face.minus {
        None => space.element_dofs(face.plus).to_vec(),
        Some(m) => union_dofs(space.element_dofs(face.plus), space.element_dofs(m)).0,
    }
}

fn element_hessian_block(
    space: &FeSpace,
    t: usize,
    points: &[([f64; 2], f64)],
    f: impl Fn(&BasisValues, usize, usize) -> f64,
) -> (Vec<usize>, Vec<f64>) {
    let det = space.affine(t).det;
    let mut local = LocalMatrix::new(space.element_dofs(t).to_vec());
    for (xi, w) in points {
        let basis = space.eval_reference(t, *xi);
        local.add_upper(|a, b| w * det * f(&basis, a, b));
    }
    local.finish()
}

/// Assembles `a_h` on the whole space.
pub fn assemble_plate_form(space: &FeSpace, spec: &PlateSpec) -> CsrMatrix {
    let k = space.degree();
    let cp = plate_constant(spec);
    let r = spec.poisson_ratio / (1.0 - spec.poisson_ratio);
    let beta = spec.penalty * cp;
    let rule: Vec<([f64; 2], f64)> = triangle_rule(2 * k).unwrap().iter().map(|(p, w)| (*p, w)).collect();
    let mut triplets = TripletBuilder::square(space.num_dofs());

    for t in 0..space.mesh().num_triangles() {
        let (dofs, block) = element_hessian_block(space, t, &rule, |basis, a, b| {
            cp * moment_contraction(&basis.hessians[a], &basis.hessians[b], r)
        });
        triplets.add_local(&dofs, &block);
    }

    for face in faces_in_form(space, spec.bc) {
        let n = face.normal;
        let mut local = LocalMatrix::new(face_dofs(space, face));
        for (x, w) in face_points(space, face, 2 * k) {
            let tr = face_trace(space, face, &x);
            let moments: Vec<Vector2<f64>> = tr.hessian_avg.iter().map(|h| plate_stress(h, spec).transpose() * n).collect();
            local.add_upper(|a, b| {
                w * (-moments[a].dot(&tr.jumps[b]) - tr.jumps[a].dot(&moments[b]) + beta / face.h * tr.jumps[a].dot(&tr.jumps[b]))
            });
        }
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    triplets.into_csr()
}

/// Matrix of the plate energy norm
/// `sum_T C_P |hess v|^2_T + sum_F C_P h_F |<hess v>|^2_F + sum_F C_P / h_F |[grad v]|^2_F`
/// over the same faces as the form.
pub fn plate_energy_matrix(space: &FeSpace, spec: &PlateSpec) -> CsrMatrix {
    let k = space.degree();
    let cp = plate_constant(spec);
    let rule: Vec<([f64; 2], f64)> = triangle_rule(2 * k).unwrap().iter().map(|(p, w)| (*p, w)).collect();
    let mut triplets = TripletBuilder::square(space.num_dofs());
    for t in 0..space.mesh().num_triangles() {
        let (dofs, block) = element_hessian_block(space, t, &rule, |basis, a, b| cp * basis.hessians[a].dot(&basis.hessians[b]));
        triplets.add_local(&dofs, &block);
    }
    for face in faces_in_form(space, spec.bc) {
        let mut local = LocalMatrix::new(face_dofs(space, face));
        for (x, w) in face_points(space, face, 2 * k) {
            let tr = face_trace(space, face, &x);
            local.add_upper(|a, b| {
                w * cp * (face.h * tr.hessian_avg[a].dot(&tr.hessian_avg[b]) + tr.jumps[a].dot(&tr.jumps[b]) / face.h)
            });
        }
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    triplets.into_csr()
}

/// `l(phi_i) = (f, phi_i)` with quadrature exactness `degree`.
pub fn assemble_plate_load_with(space: &FeSpace, load: &LoadSpec, degree: usize) -> Vec<f64> {
    let rule = triangle_rule(degree).expect("load quadrature degree within range");
    let mut out = vec![0.0; space.num_dofs()];
    for t in 0..space.mesh().num_triangles() {
        let map = space.affine(t);
        for (xi, w) in rule.iter() {
            let x = map.to_physical(*xi);
            let fx = load.eval(x.x, x.y) * w * map.det;
            if fx == 0.0 {
                continue;
            }
            let basis = space.eval_reference(t, *xi);
            for (i, &dof) in space.element_dofs(t).iter().enumerate() {
                out[dof] += fx * basis.values[i];
            }
        }
    }
    out
}

pub fn assemble_plate_load(space: &FeSpace, load: &LoadSpec) -> Vec<f64> {
    assemble_plate_load_with(space, load, LOAD_QUADRATURE_DEGREE)
}

/// DOFs fixed to zero by the plate boundary condition.
pub fn plate_constraints(space: &FeSpace, bc: PlateBc) -> Vec<usize> {
    if bc.fixes_displacement() {
        space.boundary_dofs().to_vec()
    } else {
        Vec::new()
    }
}

/// `a_h(u, phi_i)` for every basis function, with `u` entering through its
/// exact derivatives at the quadrature points of exactness `degree`.
pub fn plate_form_apply_analytic(space: &FeSpace, spec: &PlateSpec, u: &dyn AnalyticField, degree: usize) -> Vec<f64> {
    let cp = plate_constant(spec);
    let r = spec.poisson_ratio / (1.0 - spec.poisson_ratio);
    let beta = spec.penalty * cp;
    let rule = triangle_rule(degree).expect("quadrature degree within range");
    let mut out = vec![0.0; space.num_dofs()];
    for t in 0..space.mesh().num_triangles() {
        let map = space.affine(t);
        for (xi, w) in rule.iter() {
            let x = map.to_physical(*xi);
            let hu = u.hessian(&x);
            let basis = space.eval_reference(t, *xi);
            for (i, &dof) in space.element_dofs(t).iter().enumerate() {
                out[dof] += w * map.det * cp * moment_contraction(&hu, &basis.hessians[i], r);
            }
        }
    }
    for face in faces_in_form(space, spec.bc) {
        let n = face.normal;
        for (x, w) in face_points(space, face, degree) {
            let tr = face_trace(space, face, &x);
            let moment = plate_stress(&u.hessian(&x), spec).transpose() * n;
            // a smooth field has no gradient jump on interior faces
            let ujump = if face.is_boundary() { u.gradient(&x) } else { Vector2::zeros() };
            for (a, &dof) in tr.dofs.iter().enumerate() {
                let m_a = plate_stress(&tr.hessian_avg[a], spec).transpose() * n;
                out[dof] += w * (-moment.dot(&tr.jumps[a]) - ujump.dot(&m_a) + beta / face.h * ujump.dot(&tr.jumps[a]));
            }
        }
    }
    out
}
