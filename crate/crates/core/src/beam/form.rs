//! Beam bilinear forms, stabilization, endpoint conditions and loads.

use nalgebra::{Matrix2, Point2, Vector2};

use super::cut::{CutTopology, IntersectionPoint, SubSegment};
use super::{beam_constants, BeamSpec, EndCondition};
use crate::assembly::{face_points, union_dofs, LocalMatrix};
use crate::error::BeamError;
use crate::fem::{segment_rule, triangle_rule, BasisValues, FeSpace};
use crate::plate::LOAD_QUADRATURE_DEGREE;
use crate::sparse::{CsrMatrix, TripletBuilder};

fn segment_points(cut: &CutTopology, seg: &SubSegment, degree: usize) -> Vec<(Point2<f64>, f64)> {
    let rule = segment_rule(degree).expect("segment rule degree within range");
    let len = cut.segment_length(seg);
    rule.iter()
        .map(|(&[s], w)| (cut.point_at(seg.start + (seg.end - seg.start) * s), w * len))
        .collect()
}

fn tangential_second(basis: &BasisValues, t: &Vector2<f64>) -> Vec<f64> {
    basis.hessians.iter().map(|h| t.dot(&(h * t))).collect()
}

/// Jump of the tangential slope (before minus after) and average of the
/// tangential curvature at a crossing, on the union of both element DOFs.
struct PointTrace {
    dofs: Vec<usize>,
    jump: Vec<f64>,
    avg: Vec<f64>,
}

fn point_trace(space: &FeSpace, cut: &CutTopology, p: &IntersectionPoint) -> PointTrace {
    let t = cut.tangent;
    let before = space.eval_at(p.before, &p.point);
    let after = space.eval_at(p.after, &p.point);
    let (dofs, pos) = union_dofs(space.element_dofs(p.before), space.element_dofs(p.after));
    let mut jump = vec![0.0; dofs.len()];
    let mut avg = vec![0.0; dofs.len()];
    for i in 0..before.len() {
        jump[i] += before.gradients[i].dot(&t);
        avg[i] += 0.5 * t.dot(&(before.hessians[i] * t));
    }
    for (i, &q) in pos.iter().enumerate() {
        jump[q] -= after.gradients[i].dot(&t);
        avg[q] += 0.5 * t.dot(&(after.hessians[i] * t));
    }
    PointTrace { dofs, jump, avg }
}

fn point_h(space: &FeSpace, p: &IntersectionPoint) -> f64 {
    space.topology().face(p.face).h
}

fn add_form(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec, triplets: &mut TripletBuilder) -> Result<(), BeamError> {
    let cb = beam_constants(spec)?.stiffness;
    let t = cut.tangent;
    let k = space.degree();
    for seg in &cut.segments {
        let mut local = LocalMatrix::new(space.element_dofs(seg.element).to_vec());
        for (x, w) in segment_points(cut, seg, 2 * k) {
            let d2 = tangential_second(&space.eval_at(seg.element, &x), &t);
            local.add_upper(|a, b| w * cb * d2[a] * d2[b]);
        }
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    for p in &cut.points {
        let tr = point_trace(space, cut, p);
        let pen = spec.penalty / point_h(space, p);
        let mut local = LocalMatrix::new(tr.dofs.clone());
        local.add_upper(|a, b| cb * (-tr.avg[a] * tr.jump[b] - tr.jump[a] * tr.avg[b] + pen * tr.jump[a] * tr.jump[b]));
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    Ok(())
}

/// Beam form written with the one-dimensional tangential derivatives.
pub fn assemble_beam_form(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let mut triplets = TripletBuilder::square(space.num_dofs());
    add_form(space, cut, spec, &mut triplets)?;
    Ok(triplets.into_csr())
}

/// Same form built from the projected tensors `P grad v` and `P hess v P`
/// with `P = t t^T`.
pub fn assemble_beam_form_tensor(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let cb = beam_constants(spec)?.stiffness;
    let t = cut.tangent;
    let proj: Matrix2<f64> = t * t.transpose();
    let k = space.degree();
    let mut triplets = TripletBuilder::square(space.num_dofs());
    for seg in &cut.segments {
        let mut local = LocalMatrix::new(space.element_dofs(seg.element).to_vec());
        for (x, w) in segment_points(cut, seg, 2 * k) {
            let basis = space.eval_at(seg.element, &x);
            let stress: Vec<Matrix2<f64>> = basis.hessians.iter().map(|h| proj * h * proj * cb).collect();
            let strain: Vec<Matrix2<f64>> = basis.hessians.iter().map(|h| (h * proj + proj * h) * 0.5).collect();
            local.add_upper(|a, b| w * stress[a].dot(&strain[b]));
        }
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    for p in &cut.points {
        let before = space.eval_at(p.before, &p.point);
        let after = space.eval_at(p.after, &p.point);
        let (dofs, pos) = union_dofs(space.element_dofs(p.before), space.element_dofs(p.after));
        let mut jump = vec![Vector2::zeros(); dofs.len()];
        let mut traction = vec![Vector2::zeros(); dofs.len()];
        for i in 0..before.len() {
            jump[i] += proj * before.gradients[i];
            traction[i] += (proj * before.hessians[i] * proj * cb).transpose() * t * 0.5;
        }
        for (i, &q) in pos.iter().enumerate() {
            jump[q] -= proj * after.gradients[i];
            traction[q] += (proj * after.hessians[i] * proj * cb).transpose() * t * 0.5;
        }
        let pen = spec.penalty * cb / point_h(space, p);
        let mut local = LocalMatrix::new(dofs);
        local.add_upper(|a, b| -traction[a].dot(&jump[b]) - jump[a].dot(&traction[b]) + pen * jump[a].dot(&jump[b]));
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    Ok(triplets.into_csr())
}

fn add_stabilization(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec, triplets: &mut TripletBuilder) -> Result<(), BeamError> {
    let cb = beam_constants(spec)?.stiffness;
    let k = space.degree();
    let h = cut.h;
    let (t, n) = (cut.tangent, cut.normal);

    if spec.gamma_faces > 0.0 {
        let orders: Vec<(usize, f64)> = (1..=k.min(3)).map(|j| (j, spec.gamma_faces * cb * h.powi(2 * (j as i32 - 2)))).collect();
        for &f in &cut.active_faces {
            let face = space.topology().face(f);
            let minus = face.minus.expect("active faces are interior");
            let (dofs, pos) = union_dofs(space.element_dofs(face.plus), space.element_dofs(minus));
            let nf = face.normal;
            let mut local = LocalMatrix::new(dofs);
            for (x, w) in face_points(space, face, 2 * k) {
                let bp = space.eval_at(face.plus, &x);
                let bm = space.eval_at(minus, &x);
                let jumps: Vec<Vec<f64>> = orders
                    .iter()
                    .map(|&(j, _)| {
                        let mut jump = vec![0.0; local.len()];
                        for i in 0..bp.len() {
                            jump[i] += bp.normal_derivative(i, j, &nf);
                        }
                        for (i, &q) in pos.iter().enumerate() {
                            jump[q] -= bm.normal_derivative(i, j, &nf);
                        }
                        jump
                    })
                    .collect();
                local.add_upper(|a, b| w * orders.iter().zip(&jumps).map(|((_, c), jj)| c * jj[a] * jj[b]).sum::<f64>());
            }
            let (dofs, block) = local.finish();
            triplets.add_local(&dofs, &block);
        }
    }

    if spec.gamma_elements > 0.0 {
        let weights: [f64; 3] = [0, 1, 2].map(|j| spec.gamma_elements * cb * h.powi(2 * (j - 2) + 1));
        let rule = triangle_rule(2 * k).expect("quadrature degree within range");
        for seg in &cut.segments {
            let e = seg.element;
            let det = space.affine(e).det;
            let mut local = LocalMatrix::new(space.element_dofs(e).to_vec());
            for (xi, w) in rule.iter() {
                let basis = space.eval_reference(e, *xi);
                let d: [Vec<f64>; 3] = [
                    basis.gradients.iter().map(|g| n.dot(g)).collect(),
                    basis.hessians.iter().map(|hs| n.dot(&(hs * t))).collect(),
                    (0..basis.len()).map(|i| basis.third_derivative(i, [n, t, t])).collect(),
                ];
                local.add_upper(|a, b| w * det * (0..3).map(|j| weights[j] * d[j][a] * d[j][b]).sum::<f64>());
            }
            let (dofs, block) = local.finish();
            triplets.add_local(&dofs, &block);
        }
    }
    Ok(())
}

/// Ghost-penalty stabilization on the active elements and the faces between them.
pub fn assemble_beam_stabilization(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let mut triplets = TripletBuilder::square(space.num_dofs());
    add_stabilization(space, cut, spec, &mut triplets)?;
    Ok(triplets.into_csr())
}

/// Mean face size of the element containing an endpoint.
fn endpoint_h(space: &FeSpace, element: usize) -> f64 {
    space.topology().triangle_faces(element).iter().map(|&f| space.topology().face(f).h).sum::<f64>() / 3.0
}

fn add_endpoints(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec, triplets: &mut TripletBuilder) -> Result<(), BeamError> {
    let cb = beam_constants(spec)?.stiffness;
    let t = cut.tangent;
    let first = cut.segments.first().expect("cut has at least one segment");
    let last = cut.segments.last().expect("cut has at least one segment");
    // sign of the outward beam direction relative to the tangent
    let ends = [(spec.start_condition, first, cut.start, -1.0), (spec.end_condition, last, cut.end, 1.0)];
    for (cond, seg, x, sign) in ends {
        let element = seg.element;
        if cond == EndCondition::Free {
            continue;
        }
        let he = endpoint_h(space, element);
        let basis = space.eval_at(element, &x);
        let d1: Vec<f64> = basis.gradients.iter().map(|g| g.dot(&t)).collect();
        let d2 = tangential_second(&basis, &t);
        let pin = spec.endpoint_penalty * cb / he.powi(3);
        let clamp = cond == EndCondition::Clamped;
        // The consistency term sees v'' on the end piece only; a short piece
        // needs a proportionally larger rotation penalty.
        let rot = spec.penalty * cb / he.min(cut.segment_length(seg));
        let mut local = LocalMatrix::new(space.element_dofs(element).to_vec());
        local.add_upper(|a, b| {
            let mut v = pin * basis.values[a] * basis.values[b];
            if clamp {
                v += -sign * cb * (d2[a] * d1[b] + d1[a] * d2[b]) + rot * d1[a] * d1[b];
            }
            v
        });
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    Ok(())
}

/// Weak support conditions at the beam end points.
pub fn assemble_beam_endpoint_terms(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let mut triplets = TripletBuilder::square(space.num_dofs());
    add_endpoints(space, cut, spec, &mut triplets)?;
    Ok(triplets.into_csr())
}

/// Form, stabilization and endpoint terms of one beam.
pub fn assemble_beam_operator(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let mut triplets = TripletBuilder::square(space.num_dofs());
    add_form(space, cut, spec, &mut triplets)?;
    add_stabilization(space, cut, spec, &mut triplets)?;
    add_endpoints(space, cut, spec, &mut triplets)?;
    Ok(triplets.into_csr())
}

/// `(a f, phi_i)` over the beam, with `f` a function of arc length.
pub fn assemble_beam_load(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<Vec<f64>, BeamError> {
    let area = beam_constants(spec)?.area;
    let mut out = vec![0.0; space.num_dofs()];
    let rule = segment_rule(LOAD_QUADRATURE_DEGREE).expect("segment rule degree within range");
    for seg in &cut.segments {
        let len = cut.segment_length(seg);
        for (&[s], w) in rule.iter() {
            let param = seg.start + (seg.end - seg.start) * s;
            let f = spec.line_load.eval(param * cut.length);
            if f == 0.0 {
                continue;
            }
            let basis = space.eval_at(seg.element, &cut.point_at(param));
            for (i, &dof) in space.element_dofs(seg.element).iter().enumerate() {
                out[dof] += w * len * area * f * basis.values[i];
            }
        }
    }
    Ok(out)
}

/// Matrix of the beam energy norm
/// `C_B |v''|^2_Sigma + sum_x C_B h_x <v''>^2 + C_B / h_x [v']^2`.
pub fn beam_energy_matrix(space: &FeSpace, cut: &CutTopology, spec: &BeamSpec) -> Result<CsrMatrix, BeamError> {
    let cb = beam_constants(spec)?.stiffness;
    let t = cut.tangent;
    let k = space.degree();
    let mut triplets = TripletBuilder::square(space.num_dofs());
    for seg in &cut.segments {
        let mut local = LocalMatrix::new(space.element_dofs(seg.element).to_vec());
        for (x, w) in segment_points(cut, seg, 2 * k) {
            let d2 = tangential_second(&space.eval_at(seg.element, &x), &t);
            local.add_upper(|a, b| w * cb * d2[a] * d2[b]);
        }
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    for p in &cut.points {
        let tr = point_trace(space, cut, p);
        let hx = point_h(space, p);
        let mut local = LocalMatrix::new(tr.dofs.clone());
        local.add_upper(|a, b| cb * (hx * tr.avg[a] * tr.avg[b] + tr.jump[a] * tr.jump[b] / hx));
        let (dofs, block) = local.finish();
        triplets.add_local(&dofs, &block);
    }
    Ok(triplets.into_csr())
}
