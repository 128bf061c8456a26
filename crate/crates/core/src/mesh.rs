//! Conforming triangulations of polygonal domains and their face topology.
//!
//! A [`Mesh`] holds vertex coordinates and counter-clockwise triangles. The
//! derived [`FaceTopology`] enumerates every edge once, fixes a unit normal
//! per face (the exterior normal on the boundary, pointing from the first to
//! the second neighbour in the interior) and the face size
//! `h_F = (|T+| + |T-|) / (2 |F|)`. Boundary faces use `h_F = |T+| / |F|`.

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};

use crate::error::MeshError;

/// Relative area below which a triangle counts as degenerate.
const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point2<f64>>,
    triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh, reorienting clockwise triangles and validating the rest.
    pub fn new(vertices: Vec<Point2<f64>>, mut triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(MeshError::Invalid("mesh needs at least one vertex and one triangle".into()));
        }
        let nv = vertices.len();
        let scale = bounding_diameter(&vertices).max(f64::MIN_POSITIVE);
        for (t, tri) in triangles.iter_mut().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
                return Err(MeshError::Invalid(format!(
                    "triangle {t} references vertex {bad}, but only {nv} vertices exist"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Invalid(format!("triangle {t} repeats a vertex: {tri:?}")));
            }
            let area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if area.abs() <= DEGENERATE_AREA * scale * scale {
                return Err(MeshError::Invalid(format!("triangle {t} has zero area (positive area violated)")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mesh = Self { vertices, triangles };
        mesh.check_conforming()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point2<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        signed_area(&a, &b, &c)
    }

    /// Diameter (longest edge) of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    /// Global mesh size `h = max_T h_T`.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    /// Largest circumradius/inradius quotient over all triangles.
    ///
    /// The equilateral triangle attains the minimum value 2.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let [a, b, c] = self.triangle_vertices(t);
                let (la, lb, lc) = ((c - b).norm(), (a - c).norm(), (b - a).norm());
                let area = self.area(t);
                let circum = la * lb * lc / (4.0 * area);
                let inradius = 2.0 * area / (la + lb + lc);
                circum / inradius
            })
            .fold(0.0, f64::max)
    }

    /// Rejects hanging vertices: no vertex may sit inside an edge that has a
    /// single adjacent triangle unless that edge is on the outer boundary,
    /// which a T-junction can never satisfy.
    fn check_conforming(&self) -> Result<(), MeshError> {
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for (a, b) in local_edges(tri) {
                *counts.entry(sorted_pair(a, b)).or_default() += 1;
            }
        }
        let scale = bounding_diameter(&self.vertices);
        for (&(a, b), &count) in &counts {
            if count > 2 {
                return Err(MeshError::NonManifoldEdge { a, b, count });
            }
            if count == 1 {
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                let edge = pb - pa;
                let len2 = edge.norm_squared();
                for (v, p) in self.vertices.iter().enumerate() {
                    if v == a || v == b {
                        continue;
                    }
                    let s = (p - pa).dot(&edge) / len2;
                    if s <= 1e-12 || s >= 1.0 - 1e-12 {
                        continue;
                    }
                    let dist = (p - (pa + edge * s)).norm();
                    if dist <= 1e-12 * scale {
                        return Err(MeshError::Invalid(format!(
                            "vertex {v} lies inside edge ({a}, {b}); triangles must share a full edge (conforming violated)"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Structured triangulation of the unit square with `n` cells per side.
///
/// Each cell is split along the diagonal from its lower-left to its
/// upper-right corner. Vertex `(i, j)` has index `j * (n + 1) + i`.
pub fn generate_structured_unit_square(n: usize) -> Mesh {
    assert!(n >= 1, "structured mesh needs n >= 1");
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(i as f64 * h, j as f64 * h));
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (ll, lr, ul, ur) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }
    Mesh { vertices, triangles }
}

/// Parses the ASCII mesh format: `nv nt`, then `nv` lines `x y`, then `nt`
/// lines `i j k` with 0-based vertex indices. `#` starts a comment.
pub fn load_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let parse_err = |line: usize, message: String| MeshError::Parse { line, message };

    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `nv nt`".into()))?;
    let header: Vec<&str> = header.split_whitespace().collect();
    if header.len() != 2 {
        return Err(parse_err(line, format!("expected `nv nt`, found {} fields", header.len())));
    }
    let nv: usize = header[0].parse().map_err(|e| parse_err(line, format!("bad vertex count: {e}")))?;
    let nt: usize = header[1].parse().map_err(|e| parse_err(line, format!("bad triangle count: {e}")))?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines.next().ok_or_else(|| parse_err(0, format!("expected {nv} vertices")))?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(line, format!("expected `x y`, found {} fields", fields.len())));
        }
        let x: f64 = fields[0].parse().map_err(|e| parse_err(line, format!("bad x coordinate: {e}")))?;
        let y: f64 = fields[1].parse().map_err(|e| parse_err(line, format!("bad y coordinate: {e}")))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(line, "non-finite coordinate".into()));
        }
        vertices.push(Point2::new(x, y));
    }

    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (line, l) = lines.next().ok_or_else(|| parse_err(0, format!("expected {nt} triangles")))?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected `i j k`, found {} fields", fields.len())));
        }
        let mut tri = [0usize; 3];
        for (slot, f) in tri.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|e| parse_err(line, format!("bad vertex index: {e}")))?;
        }
        triangles.push(tri);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing data after the last triangle".into()));
    }
    Mesh::new(vertices, triangles)
}

/// Serializes a mesh in the format read by [`load_mesh`].
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = format!("{} {}\n", mesh.num_vertices(), mesh.num_triangles());
    for v in mesh.vertices() {
        out.push_str(&format!("{:.17e} {:.17e}\n", v.x, v.y));
    }
    for [a, b, c] in mesh.triangles() {
        out.push_str(&format!("{a} {b} {c}\n"));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// End points, lower global index first.
    pub vertices: [usize; 2],
    /// `T+`: the normal is the exterior normal of this triangle.
    pub plus: usize,
    /// `T-`, absent on the boundary.
    pub minus: Option<usize>,
    pub normal: Vector2<f64>,
    pub length: f64,
    pub h: f64,
}

impl Face {
    pub fn kind(&self) -> FaceKind {
        if self.minus.is_some() {
            FaceKind::Interior
        } else {
            FaceKind::Boundary
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceTopology {
    faces: Vec<Face>,
    /// Face index of each local edge `(0,1), (1,2), (2,0)` per triangle.
    triangle_faces: Vec<[usize; 3]>,
}

impl FaceTopology {
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn triangle_faces(&self, t: usize) -> [usize; 3] {
        self.triangle_faces[t]
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(|(_, f)| !f.is_boundary())
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(|(_, f)| f.is_boundary())
    }

    /// Face shared by two triangles, if any.
    pub fn shared_face(&self, a: usize, b: usize) -> Option<usize> {
        self.triangle_faces[a].iter().copied().find(|&f| {
            let face = &self.faces[f];
            (face.plus == a && face.minus == Some(b)) || (face.plus == b && face.minus == Some(a))
        })
    }

    /// Copy with the orientation of the selected interior faces reversed:
    /// `T+` and `T-` swap and the normal flips.
    pub fn with_flipped(&self, flip: impl Fn(usize) -> bool) -> Self {
        let mut out = self.clone();
        for (f, face) in out.faces.iter_mut().enumerate() {
            if let Some(minus) = face.minus {
                if flip(f) {
                    face.minus = Some(face.plus);
                    face.plus = minus;
                    face.normal = -face.normal;
                }
            }
        }
        out
    }

    /// DOF-independent check of the Euler characteristic `V - E + T`.
    pub fn euler_characteristic(&self, mesh: &Mesh) -> i64 {
        mesh.num_vertices() as i64 - self.faces.len() as i64 + mesh.num_triangles() as i64
    }
}

/// Enumerates the faces of `mesh` in order of first appearance over the
/// triangles' local edges.
pub fn build_face_topology(mesh: &Mesh) -> Result<FaceTopology, MeshError> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces: Vec<Face> = Vec::new();
    let mut triangle_faces = Vec::with_capacity(mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let mut local = [0usize; 3];
        for (e, (a, b)) in local_edges(tri).into_iter().enumerate() {
            let key = sorted_pair(a, b);
            let f = match index.get(&key) {
                Some(&f) => {
                    let face = &mut faces[f];
                    if face.minus.is_some() {
                        return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1, count: 3 });
                    }
                    face.minus = Some(t);
                    f
                }
                None => {
                    let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                    let edge = pb - pa;
                    let length = edge.norm();
                    // counter-clockwise triangle: exterior normal is the edge rotated by -90 degrees
                    let normal = Vector2::new(edge.y, -edge.x) / length;
                    faces.push(Face { vertices: [key.0, key.1], plus: t, minus: None, normal, length, h: 0.0 });
                    index.insert(key, faces.len() - 1);
                    faces.len() - 1
                }
            };
            local[e] = f;
        }
        triangle_faces.push(local);
    }
    for face in &mut faces {
        let area_plus = mesh.area(face.plus);
        face.h = match face.minus {
            Some(m) => (area_plus + mesh.area(m)) / (2.0 * face.length),
            None => area_plus / face.length,
        };
    }
    Ok(FaceTopology { faces, triangle_faces })
}

pub(crate) fn signed_area(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn local_edges(tri: &[usize; 3]) -> [(usize, usize); 3] {
    [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn bounding_diameter(vertices: &[Point2<f64>]) -> f64 {
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for v in vertices {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    (hi - lo).norm()
}
