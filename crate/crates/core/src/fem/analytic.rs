use nalgebra::{Matrix2, Point2, Vector2};

/// Scalar field with closed-form first and second derivatives.
pub trait AnalyticField: Send + Sync {
    fn value(&self, p: &Point2<f64>) -> f64;
    fn gradient(&self, p: &Point2<f64>) -> Vector2<f64>;
    fn hessian(&self, p: &Point2<f64>) -> Matrix2<f64>;
}

/// `u(x, y) = x^2 (1 - x)^2 y^2 (1 - y)^2`, clamped on the unit square.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClampedBubble;

fn g(x: f64) -> f64 {
    x * x * (1.0 - x) * (1.0 - x)
}

fn dg(x: f64) -> f64 {
    2.0 * x * (1.0 - x) * (1.0 - 2.0 * x)
}

fn ddg(x: f64) -> f64 {
    2.0 - 12.0 * x + 12.0 * x * x
}

impl AnalyticField for ClampedBubble {
    fn value(&self, p: &Point2<f64>) -> f64 {
        g(p.x) * g(p.y)
    }

    fn gradient(&self, p: &Point2<f64>) -> Vector2<f64> {
        Vector2::new(dg(p.x) * g(p.y), g(p.x) * dg(p.y))
    }

    fn hessian(&self, p: &Point2<f64>) -> Matrix2<f64> {
        let xy = dg(p.x) * dg(p.y);
        Matrix2::new(ddg(p.x) * g(p.y), xy, xy, g(p.x) * ddg(p.y))
    }
}

impl ClampedBubble {
    /// `Delta^2 u = 24 (g(x) + g(y)) + 2 g''(x) g''(y)`.
    pub fn bilaplacian(&self, x: f64, y: f64) -> f64 {
        24.0 * (g(x) + g(y)) + 2.0 * ddg(x) * ddg(y)
    }
}

/// Affine or quadratic polynomial `c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic(pub [f64; 6]);

impl AnalyticField for Quadratic {
    fn value(&self, p: &Point2<f64>) -> f64 {
        let c = &self.0;
        c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y
    }

    fn gradient(&self, p: &Point2<f64>) -> Vector2<f64> {
        let c = &self.0;
        Vector2::new(c[1] + 2.0 * c[3] * p.x + c[4] * p.y, c[2] + c[4] * p.x + 2.0 * c[5] * p.y)
    }

    fn hessian(&self, _p: &Point2<f64>) -> Matrix2<f64> {
        let c = &self.0;
        Matrix2::new(2.0 * c[3], c[4], c[4], 2.0 * c[5])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bubble_derivatives_match_finite_differences() {
        let u = ClampedBubble;
        let p = Point2::new(0.3, 0.65);
        let e = 1e-5;
        let dx = Vector2::new(e, 0.0);
        let dy = Vector2::new(0.0, e);
        let fd_grad = Vector2::new((u.value(&(p + dx)) - u.value(&(p - dx))) / (2.0 * e), (u.value(&(p + dy)) - u.value(&(p - dy))) / (2.0 * e));
        assert_relative_eq!(u.gradient(&p), fd_grad, max_relative = 1e-8);
        let fd_h0 = (u.gradient(&(p + dx)) - u.gradient(&(p - dx))) / (2.0 * e);
        let fd_h1 = (u.gradient(&(p + dy)) - u.gradient(&(p - dy))) / (2.0 * e);
        let h = u.hessian(&p);
        assert_relative_eq!(h.column(0).into_owned(), fd_h0, max_relative = 1e-7);
        assert_relative_eq!(h.column(1).into_owned(), fd_h1, max_relative = 1e-7);
    }
}
