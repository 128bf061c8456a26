//! Gauss rules on the unit segment `[0, 1]` and the reference triangle
//! `{(x, y) : x, y >= 0, x + y <= 1}`.
//!
//! Triangle rules are collapsed (Duffy) products of Gauss-Legendre rules, so
//! every exactness degree up to [`MAX_DEGREE`] is available and all weights
//! are positive with points strictly inside the triangle.

use crate::error::FemError;

pub const MAX_DEGREE: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(&[f64; D]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

pub type SegmentRule = QuadratureRule<1>;
pub type TriangleRule = QuadratureRule<2>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Gauss rule on `[0, 1]` exact for polynomials of degree `degree`.
pub fn segment_rule(degree: usize) -> Result<SegmentRule, FemError> {
    if degree > MAX_DEGREE {
        return Err(FemError::UnsupportedQuadrature(degree));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(SegmentRule {
        points: x.iter().map(|&x| [0.5 * (x + 1.0)]).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
        degree,
    })
}

/// Rule on the reference triangle exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule, FemError> {
    if degree > MAX_DEGREE {
        return Err(FemError::UnsupportedQuadrature(degree));
    }
    // x = u (1 - v), y = v maps the unit square onto the triangle with
    // Jacobian (1 - v): degree d in u and d + 1 in v.
    let inner = segment_rule(degree)?;
    let outer = segment_rule(degree + 1)?;
    let mut points = Vec::with_capacity(inner.len() * outer.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&[v], wv) in outer.iter() {
        for (&[u], wu) in inner.iter() {
            points.push([u * (1.0 - v), v]);
            weights.push(wu * wv * (1.0 - v));
        }
    }
    Ok(TriangleRule { points, weights, degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact integral of `x^a y^b` over the reference triangle: `a! b! / (a + b + 2)!`.
    fn triangle_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn degree_zero_triangle_has_reference_area() {
        let rule = triangle_rule(0).unwrap();
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn segment_cubic() {
        let rule = segment_rule(3).unwrap();
        assert_relative_eq!(rule.integrate(|&[x]| x.powi(3)), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn triangle_x4y4() {
        let rule = triangle_rule(10).unwrap();
        let value = rule.integrate(|&[x, y]| x.powi(4) * y.powi(4));
        assert_relative_eq!(value, 1.0 / 6300.0, max_relative = 1e-14);
        assert_relative_eq!(triangle_monomial(4, 4), 1.0 / 6300.0, max_relative = 1e-15);
    }

    #[test]
    fn triangle_rules_exact_up_to_degree() {
        for degree in 0..=14 {
            let rule = triangle_rule(degree).unwrap();
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 0.5, max_relative = 1e-14);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let value = rule.integrate(|&[x, y]| x.powi(a as i32) * y.powi(b as i32));
                    assert_relative_eq!(value, triangle_monomial(a, b), max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn segment_rules_exact_up_to_degree() {
        for degree in 0..=24 {
            let rule = segment_rule(degree).unwrap();
            for a in 0..=degree as i32 {
                let value = rule.integrate(|&[x]| x.powi(a));
                assert_relative_eq!(value, 1.0 / (a as f64 + 1.0), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(triangle_rule(MAX_DEGREE + 1), Err(FemError::UnsupportedQuadrature(_))));
    }
}
