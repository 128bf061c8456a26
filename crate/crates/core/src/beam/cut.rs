//! Intersection of a straight beam with the triangle mesh.

use nalgebra::{Point2, Vector2};
use robust::{orient2d, Coord};

use crate::error::BeamError;
use crate::mesh::{FaceTopology, Mesh};

/// Sub-segments shorter than this multiple of `h` are dropped and breakpoints
/// closer than it are merged.
pub const MERGE_TOL: f64 = 1e-10;
/// Faces within this angle (as a sine) of the beam count as parallel.
pub const ANGLE_TOL: f64 = 1e-12;
/// Minimum overlap, relative to `h`, for a parallel face to be rejected.
pub const OVERLAP_TOL: f64 = 1e-12;

/// Part of the beam inside one element, as a parameter range in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubSegment {
    pub element: usize,
    pub start: f64,
    pub end: f64,
}

/// Point where the beam passes from `before` into `after`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntersectionPoint {
    pub param: f64,
    pub point: Point2<f64>,
    /// Crossed face; at a vertex crossing the lowest-index face of `before`
    /// through the vertex.
    pub face: usize,
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug)]
pub struct CutTopology {
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    pub length: f64,
    pub tangent: Vector2<f64>,
    /// Tangent rotated by +90 degrees.
    pub normal: Vector2<f64>,
    /// Global mesh size.
    pub h: f64,
    /// Ordered from start to end.
    pub segments: Vec<SubSegment>,
    pub points: Vec<IntersectionPoint>,
    /// Interior faces whose both neighbours are cut by the beam.
    pub active_faces: Vec<usize>,
}

impl CutTopology {
    pub fn point_at(&self, param: f64) -> Point2<f64> {
        self.start + (self.end - self.start) * param
    }

    /// Active elements in order along the beam.
    pub fn active_elements(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.element).collect()
    }

    pub fn segment_length(&self, s: &SubSegment) -> f64 {
        (s.end - s.start) * self.length
    }
}

fn coord(p: &Point2<f64>) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

pub fn compute_cut_topology(
    mesh: &Mesh,
    topology: &FaceTopology,
    start: Point2<f64>,
    end: Point2<f64>,
) -> Result<CutTopology, BeamError> {
    let d = end - start;
    let length = d.norm();
    if !(length > 0.0) {
        return Err(BeamError::Invalid("beam start and end points coincide".into()));
    }
    let tangent = d / length;
    let normal = Vector2::new(-tangent.y, tangent.x);
    let h = mesh.mesh_size();
    let verts = mesh.vertices();

    for p in [start, end] {
        let inside = (0..mesh.num_triangles()).any(|t| {
            let [a, b, c] = mesh.triangles()[t].map(|i| coord(&verts[i]));
            let q = coord(&p);
            orient2d(a, b, q) >= 0.0 && orient2d(b, c, q) >= 0.0 && orient2d(c, a, q) >= 0.0
        });
        if !inside {
            return Err(BeamError::EndpointOutside { x: p.x, y: p.y });
        }
    }

    for (f, face) in topology.faces().iter().enumerate() {
        let a = verts[face.vertices[0]];
        let b = verts[face.vertices[1]];
        let oa = orient2d(coord(&start), coord(&end), coord(&a));
        let ob = orient2d(coord(&start), coord(&end), coord(&b));
        let e = b - a;
        let sin = (e.x * tangent.y - e.y * tangent.x).abs() / e.norm();
        let near = |o: f64| (o / length).abs() <= MERGE_TOL * h;
        let parallel = (oa == 0.0 && ob == 0.0) || (sin <= ANGLE_TOL && near(oa) && near(ob));
        if !parallel {
            continue;
        }
        let sa = (a - start).dot(&tangent);
        let sb = (b - start).dot(&tangent);
        let overlap = sa.max(sb).min(length) - sa.min(sb).max(0.0);
        if overlap > OVERLAP_TOL * h {
            return Err(BeamError::Collinear { face: f });
        }
    }

    let min_param = MERGE_TOL * h / length;
    let mut intervals: Vec<SubSegment> = Vec::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for i in 0..3 {
            let a = coord(&verts[tri[i]]);
            let b = coord(&verts[tri[(i + 1) % 3]]);
            let o0 = orient2d(a, b, coord(&start));
            let o1 = orient2d(a, b, coord(&end));
            if o0 >= 0.0 && o1 >= 0.0 {
                continue;
            }
            if o0 < 0.0 && o1 < 0.0 {
                hi = -1.0;
                break;
            }
            let s = o0 / (o0 - o1);
            if o0 < 0.0 {
                lo = lo.max(s);
            } else {
                hi = hi.min(s);
            }
        }
        if hi - lo > min_param {
            intervals.push(SubSegment { element: t, start: lo, end: hi });
        }
    }
    intervals.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));

    let mut cursor = 0.0;
    for s in &intervals {
        if (s.start - cursor).abs() > min_param {
            return Err(BeamError::Gap { from: cursor, to: s.start });
        }
        cursor = s.end;
    }
    if intervals.is_empty() || (1.0 - cursor) > min_param {
        return Err(BeamError::Gap { from: cursor, to: 1.0 });
    }

    let m = intervals.len();
    let mut segments = intervals.clone();
    segments[0].start = 0.0;
    segments[m - 1].end = 1.0;
    let mut points = Vec::with_capacity(m - 1);
    for i in 1..m {
        let param = 0.5 * (intervals[i - 1].end + intervals[i].start);
        segments[i - 1].end = param;
        segments[i].start = param;
        let point = start + d * param;
        let (before, after) = (intervals[i - 1].element, intervals[i].element);
        let face = topology
            .shared_face(before, after)
            .or_else(|| face_through(mesh, topology, before, &point, h))
            .ok_or_else(|| BeamError::Invalid(format!("no face of element {before} contains the crossing at parameter {param}")))?;
        points.push(IntersectionPoint { param, point, face, before, after });
    }

    let mut active = segments.iter().map(|s| s.element).collect::<Vec<_>>();
    active.sort_unstable();
    let active_faces = topology
        .faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.minus.is_some_and(|m| active.binary_search(&m).is_ok()) && active.binary_search(&f.plus).is_ok())
        .map(|(i, _)| i)
        .collect();

    Ok(CutTopology { start, end, length, tangent, normal, h, segments, points, active_faces })
}

/// Lowest-index face of `t` passing within tolerance of `x`.
fn face_through(mesh: &Mesh, topology: &FaceTopology, t: usize, x: &Point2<f64>, h: f64) -> Option<usize> {
    let mut faces = topology.triangle_faces(t);
    faces.sort_unstable();
    faces.into_iter().find(|&f| {
        let face = topology.face(f);
        let a = mesh.vertices()[face.vertices[0]];
        face.normal.dot(&(x - a)).abs() <= MERGE_TOL * h
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_face_topology, generate_structured_unit_square};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cut(n: usize, p0: (f64, f64), p1: (f64, f64)) -> Result<(Mesh, FaceTopology, CutTopology), BeamError> {
        let mesh = generate_structured_unit_square(n);
        let topo = build_face_topology(&mesh).unwrap();
        let c = compute_cut_topology(&mesh, &topo, Point2::new(p0.0, p0.1), Point2::new(p1.0, p1.1))?;
        Ok((mesh, topo, c))
    }

    /// Crossing parameters by intersecting the segment with every edge line.
    fn brute_force_params(mesh: &Mesh, topo: &FaceTopology, p0: Point2<f64>, p1: Point2<f64>) -> Vec<f64> {
        let d = p1 - p0;
        let mut out: Vec<f64> = Vec::new();
        for face in topo.faces() {
            let a = mesh.vertices()[face.vertices[0]];
            let e = mesh.vertices()[face.vertices[1]] - a;
            let det = d.x * (-e.y) - d.y * (-e.x);
            if det.abs() < 1e-14 {
                continue;
            }
            let r = a - p0;
            let s = (r.x * (-e.y) - r.y * (-e.x)) / det;
            let u = (d.x * r.y - d.y * r.x) / det;
            if s > 1e-12 && s < 1.0 - 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&u) && !out.iter().any(|q| (q - s).abs() < 1e-9) {
                out.push(s);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn vertical_beam_near_midline() {
        let (mesh, topo, c) = cut(2, (0.499, 0.0), (0.499, 1.0)).unwrap();
        assert_eq!(c.segments.len(), 4);
        assert_eq!(c.points.len(), 3);
        let params: Vec<f64> = c.points.iter().map(|p| p.param).collect();
        for (a, b) in params.iter().zip([0.499, 0.5, 0.999]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
        let oracle = brute_force_params(&mesh, &topo, c.start, c.end);
        assert_eq!(oracle.len(), params.len());
        for (a, b) in params.iter().zip(&oracle) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let total: f64 = c.segments.iter().map(|s| c.segment_length(s)).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-14);
        // each crossed face separates the two elements it joins
        for p in &c.points {
            let f = topo.face(p.face);
            assert!(f.plus == p.before || f.minus == Some(p.before));
            assert!(f.plus == p.after || f.minus == Some(p.after));
        }
        // three interior faces join consecutive active elements
        assert_eq!(c.active_faces.len(), 3);
    }

    #[test]
    fn beam_on_mesh_line_is_rejected() {
        assert!(matches!(cut(2, (0.5, 0.0), (0.5, 1.0)), Err(BeamError::Collinear { .. })));
        assert!(matches!(cut(4, (0.0, 0.0), (1.0, 1.0)), Err(BeamError::Collinear { .. })));
    }

    #[test]
    fn endpoint_outside() {
        assert!(matches!(cut(2, (0.3, -0.1), (0.3, 0.9)), Err(BeamError::EndpointOutside { .. })));
    }

    #[test]
    fn single_triangle() {
        let mesh = Mesh::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)], vec![[0, 1, 2]]).unwrap();
        let topo = build_face_topology(&mesh).unwrap();
        let c = compute_cut_topology(&mesh, &topo, Point2::new(0.1, 0.1), Point2::new(0.6, 0.2)).unwrap();
        assert_eq!(c.segments, vec![SubSegment { element: 0, start: 0.0, end: 1.0 }]);
        assert!(c.points.is_empty());
        assert!(c.active_faces.is_empty());
    }

    #[test]
    fn gap_across_notch() {
        // two triangles touching only at a vertex
        let v = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 1.0),
        ];
        let mesh = Mesh::new(v, vec![[0, 1, 2], [1, 3, 4]]).unwrap();
        let topo = build_face_topology(&mesh).unwrap();
        let r = compute_cut_topology(&mesh, &topo, Point2::new(0.1, 0.5), Point2::new(1.4, 0.7));
        assert!(matches!(r, Err(BeamError::Gap { .. })), "{r:?}");
    }

    #[test]
    fn vertex_crossing() {
        let (_, topo, c) = cut(2, (0.1, 0.3), (0.9, 0.7)).unwrap();
        let at_centre = c.points.iter().find(|p| (p.point - Point2::new(0.5, 0.5)).norm() < 1e-12).unwrap();
        assert!(topo.triangle_faces(at_centre.before).contains(&at_centre.face));
        let total: f64 = c.segments.iter().map(|s| c.segment_length(s)).sum();
        assert_relative_eq!(total, c.length, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn cut_tiles_the_segment(x0 in 0.0..1.0f64, y0 in 0.0..1.0f64, x1 in 0.0..1.0f64, y1 in 0.0..1.0f64, n in 1usize..6) {
            prop_assume!((x1 - x0).hypot(y1 - y0) > 1e-3);
            let (mesh, topo, c) = match cut(n, (x0, y0), (x1, y1)) {
                Ok(v) => v,
                Err(BeamError::Collinear { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            prop_assert_eq!(c.points.len() + 1, c.segments.len());
            let total: f64 = c.segments.iter().map(|s| c.segment_length(s)).sum();
            prop_assert!((total - c.length).abs() < 1e-12);
            for w in c.segments.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
            }
            for s in &c.segments {
                let mid = c.point_at(0.5 * (s.start + s.end));
                let [a, b, d] = mesh.triangle_vertices(s.element);
                let map = crate::fem::AffineMap::new([a, b, d]);
                prop_assert!(map.min_barycentric(&mid) > -1e-9);
            }
            let oracle = brute_force_params(&mesh, &topo, c.start, c.end);
            prop_assert_eq!(oracle.len(), c.points.len());
            for (p, q) in c.points.iter().zip(&oracle) {
                prop_assert!((p.param - q).abs() < 1e-9);
            }
        }
    }
}
