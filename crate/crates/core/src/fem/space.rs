//! Continuous Lagrange `P_k` space on a triangle mesh.
//!
//! Global numbering: vertex DOFs first, then `k - 1` nodes per face in face
//! index order (running from the lower to the higher vertex index), then
//! interior nodes per triangle.

use std::sync::Arc;

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::FemError;
use crate::fem::reference::{BasisValues, ReferenceElement};
use crate::mesh::{build_face_topology, FaceTopology, Mesh};

/// Barycentric tolerance for point-in-triangle tests.
pub const INSIDE_TOL: f64 = 1e-12;

/// Affine map `x = origin + J xi` from the reference triangle.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub origin: Point2<f64>,
    pub jac: Matrix2<f64>,
    pub inv_jac: Matrix2<f64>,
    /// `|det J|`, twice the triangle area.
    pub det: f64,
}

impl AffineMap {
    pub fn new(v: [Point2<f64>; 3]) -> Self {
        let jac = Matrix2::from_columns(&[v[1] - v[0], v[2] - v[0]]);
        let inv_jac = jac.try_inverse().expect("non-degenerate triangle");
        Self { origin: v[0], jac, inv_jac, det: jac.determinant().abs() }
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Point2<f64> {
        self.origin + self.jac * Vector2::new(xi[0], xi[1])
    }

    pub fn to_reference(&self, x: &Point2<f64>) -> [f64; 2] {
        let xi = self.inv_jac * (x - self.origin);
        [xi[0], xi[1]]
    }

    /// Smallest barycentric coordinate of `x`; nonnegative inside.
    pub fn min_barycentric(&self, x: &Point2<f64>) -> f64 {
        let [a, b] = self.to_reference(x);
        a.min(b).min(1.0 - a - b)
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub gradient: Vector2<f64>,
    pub hessian: Matrix2<f64>,
}

#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    topology: Arc<FaceTopology>,
    reference: ReferenceElement,
    element_dofs: Vec<usize>,
    dof_nodes: Vec<Point2<f64>>,
    maps: Vec<AffineMap>,
    boundary_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Result<Self, FemError> {
        let topology = Arc::new(build_face_topology(&mesh)?);
        Self::with_topology(mesh, topology, degree)
    }

    /// Builds the space over a given face topology (orientation of the faces
    /// does not affect the numbering).
    pub fn with_topology(mesh: Arc<Mesh>, topology: Arc<FaceTopology>, degree: usize) -> Result<Self, FemError> {
        if degree < 2 {
            return Err(FemError::DegreeTooLow(degree));
        }
        let reference = ReferenceElement::new(degree);
        let k = degree;
        let nv = mesh.num_vertices();
        let nf = topology.num_faces();
        let n_int = reference.num_interior();
        let n_local = reference.num_basis();
        let num_dofs = nv + nf * (k - 1) + mesh.num_triangles() * n_int;

        let maps: Vec<AffineMap> = (0..mesh.num_triangles()).map(|t| AffineMap::new(mesh.triangle_vertices(t))).collect();
        let mut element_dofs = Vec::with_capacity(mesh.num_triangles() * n_local);
        let mut dof_nodes = vec![Point2::origin(); num_dofs];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let start = element_dofs.len();
            element_dofs.extend_from_slice(tri);
            let faces = topology.triangle_faces(t);
            for (e, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                let forward = tri[i] < tri[j];
                for m in 1..k {
                    let pos = if forward { m } else { k - m };
                    element_dofs.push(nv + faces[e] * (k - 1) + pos - 1);
                }
            }
            for idx in 0..n_int {
                element_dofs.push(nv + nf * (k - 1) + t * n_int + idx);
            }
            for (local, &dof) in element_dofs[start..].iter().enumerate() {
                dof_nodes[dof] = maps[t].to_physical(reference.nodes()[local]);
            }
        }

        let mut on_boundary = vec![false; num_dofs];
        for (f, face) in topology.boundary_faces() {
            on_boundary[face.vertices[0]] = true;
            on_boundary[face.vertices[1]] = true;
            for m in 0..k - 1 {
                on_boundary[nv + f * (k - 1) + m] = true;
            }
        }
        let boundary_dofs = (0..num_dofs).filter(|&i| on_boundary[i]).collect();

        Ok(Self { mesh, topology, reference, element_dofs, dof_nodes, maps, boundary_dofs })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn topology(&self) -> &FaceTopology {
        &self.topology
    }

    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_nodes.len()
    }

    pub fn dofs_per_element(&self) -> usize {
        self.reference.num_basis()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.dofs_per_element();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    pub fn dof_node(&self, dof: usize) -> Point2<f64> {
        self.dof_nodes[dof]
    }

    pub fn dof_nodes(&self) -> &[Point2<f64>] {
        &self.dof_nodes
    }

    pub fn affine(&self, t: usize) -> &AffineMap {
        &self.maps[t]
    }

    /// DOFs whose nodes lie on boundary faces.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    /// Basis functions of triangle `t` at reference coordinates `xi` (no containment check).
    pub fn eval_reference(&self, t: usize, xi: [f64; 2]) -> BasisValues {
        self.reference.eval_physical(xi, &self.maps[t].inv_jac)
    }

    /// Basis functions of triangle `t` at the physical point `x`.
    pub fn eval_basis(&self, t: usize, x: &Point2<f64>) -> Result<BasisValues, FemError> {
        let map = &self.maps[t];
        if map.min_barycentric(x) < -INSIDE_TOL {
            return Err(FemError::OutsideTriangle { triangle: t, x: x.x, y: x.y });
        }
        Ok(self.eval_reference(t, map.to_reference(x)))
    }

    /// Evaluates basis functions at a point assumed to lie in the closure of `t`.
    pub(crate) fn eval_at(&self, t: usize, x: &Point2<f64>) -> BasisValues {
        self.eval_reference(t, self.maps[t].to_reference(x))
    }

    /// Lowest-index triangle containing `x`.
    pub fn locate(&self, x: &Point2<f64>) -> Option<usize> {
        self.maps.iter().position(|m| m.min_barycentric(x) >= -INSIDE_TOL)
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.dof_nodes.iter().map(|p| f(p.x, p.y)).collect()
    }

    /// Field value and derivatives at `x` from triangle `t`.
    pub fn evaluate_in(&self, t: usize, coeffs: &[f64], x: &Point2<f64>) -> FieldValue {
        let basis = self.eval_at(t, x);
        combine(&basis, self.element_dofs(t), coeffs)
    }

    pub fn evaluate_field(&self, coeffs: &[f64], x: &Point2<f64>) -> Result<FieldValue, FemError> {
        self.check_len(coeffs)?;
        let t = self.locate(x).ok_or(FemError::OutsideMesh { x: x.x, y: x.y })?;
        Ok(self.evaluate_in(t, coeffs, x))
    }

    pub fn check_len(&self, coeffs: &[f64]) -> Result<(), FemError> {
        if coeffs.len() != self.num_dofs() {
            return Err(FemError::LengthMismatch { expected: self.num_dofs(), found: coeffs.len() });
        }
        Ok(())
    }
}

pub(crate) fn combine(basis: &BasisValues, dofs: &[usize], coeffs: &[f64]) -> FieldValue {
    let mut out = FieldValue { value: 0.0, gradient: Vector2::zeros(), hessian: Matrix2::zeros() };
    for (i, &dof) in dofs.iter().enumerate() {
        let c = coeffs[dof];
        out.value += c * basis.values[i];
        out.gradient += basis.gradients[i] * c;
        out.hessian += basis.hessians[i] * c;
    }
    out
}
