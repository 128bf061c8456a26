//! Small helpers shared by the element, face and point assemblers.

use nalgebra::Point2;

use crate::fem::{segment_rule, FeSpace};
use crate::mesh::Face;

/// Dense symmetric block over a local DOF list.
pub(crate) struct LocalMatrix {
    pub dofs: Vec<usize>,
    data: Vec<f64>,
}

impl LocalMatrix {
    pub fn new(dofs: Vec<usize>) -> Self {
        let n = dofs.len();
        Self { dofs, data: vec![0.0; n * n] }
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    /// Accumulates `f(a, b)` on the upper triangle `a <= b`.
    pub fn add_upper(&mut self, f: impl Fn(usize, usize) -> f64) {
        let n = self.len();
        for a in 0..n {
            for b in a..n {
                self.data[a * n + b] += f(a, b);
            }
        }
    }

    /// Mirrors the upper triangle and returns the row-major block.
    pub fn finish(mut self) -> (Vec<usize>, Vec<f64>) {
        let n = self.len();
        for a in 0..n {
            for b in 0..a {
                self.data[a * n + b] = self.data[b * n + a];
            }
        }
        (self.dofs, self.data)
    }
}

/// Union of two local DOF lists; returns the union and the position of each
/// entry of `second` within it (the first list keeps its positions).
pub(crate) fn union_dofs(first: &[usize], second: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut dofs = first.to_vec();
    let positions = second
        .iter()
        .map(|d| match dofs.iter().position(|x| x == d) {
            Some(p) => p,
            None => {
                dofs.push(*d);
                dofs.len() - 1
            }
        })
        .collect();
    (dofs, positions)
}

/// Physical quadrature points and weights (including `|F|`) on a face.
pub(crate) fn face_points(space: &FeSpace, face: &Face, degree: usize) -> Vec<(Point2<f64>, f64)> {
    let rule = segment_rule(degree).expect("segment rule degree within range");
    let a = space.mesh().vertices()[face.vertices[0]];
    let b = space.mesh().vertices()[face.vertices[1]];
    rule.iter().map(|(&[s], w)| (a + (b - a) * s, w * face.length)).collect()
}
