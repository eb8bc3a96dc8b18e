//! Support functions of smooth convex bodies.
//!
//! Every support function is handled through its 1-homogeneous extension
//! `h(x) = |x| h(x/|x|)`. At a unit vector `u` the ambient Hessian of that
//! extension, restricted to `u⊥`, is the matrix of principal radii, and its
//! gradient is the boundary point with outer normal `u`.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::geometry::Point;

pub trait SupportFunction: Debug + Send + Sync {
    /// `h(x)` for any nonzero `x`.
    fn value(&self, x: &Point) -> f64;

    /// `∇h(x)`, when known in closed form.
    fn gradient(&self, _x: &Point) -> Option<Point> {
        None
    }

    /// `D²h(x)`, when known in closed form.
    fn hessian(&self, _x: &Point) -> Option<Matrix3<f64>> {
        None
    }

    /// Characteristic length of the body; sets finite-difference steps.
    fn scale(&self) -> f64;

    fn describe(&self) -> String;
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallSupport {
    pub center: Point,
    pub radius: f64,
}

impl SupportFunction for BallSupport {
    fn value(&self, x: &Point) -> f64 {
        self.center.dot(x) + self.radius * x.norm()
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        Some(self.center + x.normalize() * self.radius)
    }

    fn hessian(&self, x: &Point) -> Option<Matrix3<f64>> {
        let r = x.norm();
        let u = x / r;
        Some((Matrix3::identity() - u * u.transpose()) * (self.radius / r))
    }

    fn scale(&self) -> f64 {
        self.radius
    }

    fn describe(&self) -> String {
        format!("ball(r={})", self.radius)
    }
}

/// `h(x) = sqrt(Σ aᵢ² xᵢ²) + c·x`. Planar ellipsoids leave `semi_axes.z`
/// unused because their directions have no z-component.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidSupport {
    pub semi_axes: Vector3<f64>,
    pub center: Point,
}

impl EllipsoidSupport {
    pub fn new(semi_axes: &[f64]) -> Self {
        let mut a = Vector3::repeat(1.0);
        for (slot, &v) in a.iter_mut().zip(semi_axes) {
            *slot = v;
        }
        EllipsoidSupport {
            semi_axes: a,
            center: Vector3::zeros(),
        }
    }

    fn squared_axes(&self) -> Vector3<f64> {
        self.semi_axes.component_mul(&self.semi_axes)
    }
}

impl SupportFunction for EllipsoidSupport {
    fn value(&self, x: &Point) -> f64 {
        x.dot(&self.squared_axes().component_mul(x)).sqrt() + self.center.dot(x)
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        let ax = self.squared_axes().component_mul(x);
        Some(ax / x.dot(&ax).sqrt() + self.center)
    }

    fn hessian(&self, x: &Point) -> Option<Matrix3<f64>> {
        let a2 = self.squared_axes();
        let ax = a2.component_mul(x);
        let q = x.dot(&ax).sqrt();
        Some(Matrix3::from_diagonal(&a2) / q - ax * ax.transpose() / (q * q * q))
    }

    fn scale(&self) -> f64 {
        self.semi_axes.max()
    }

    fn describe(&self) -> String {
        let a = self.semi_axes;
        format!("ellipsoid({}, {}, {})", a.x, a.y, a.z)
    }
}

/// Smooth bump `amplitude · exp(sharpness · (u·direction − 1))` on the sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub direction: Point,
    pub amplitude: f64,
    pub sharpness: f64,
}

/// Ball of radius `base` with smooth bumps added to its support function.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpySupport {
    pub base: f64,
    pub bumps: Vec<Bump>,
}

impl BumpySupport {
    /// `g(u)` and its ambient gradient for unit `u`.
    fn on_sphere(&self, u: &Point) -> (f64, Point) {
        let mut g = self.base;
        let mut grad = Vector3::zeros();
        for b in &self.bumps {
            let e = b.amplitude * (b.sharpness * (u.dot(&b.direction) - 1.0)).exp();
            g += e;
            grad += b.direction * (b.sharpness * e);
        }
        (g, grad)
    }
}

impl SupportFunction for BumpySupport {
    fn value(&self, x: &Point) -> f64 {
        let r = x.norm();
        r * self.on_sphere(&(x / r)).0
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        let u = x.normalize();
        let (g, grad) = self.on_sphere(&u);
        Some(u * g + (grad - u * u.dot(&grad)))
    }

    fn scale(&self) -> f64 {
        self.base
    }

    fn describe(&self) -> String {
        format!("bumpy(base={}, bumps={})", self.base, self.bumps.len())
    }
}

/// `λ·h(x) + c·x`: the body `λK + c`.
#[derive(Clone, Debug)]
pub struct AffineSupport {
    pub inner: Arc<dyn SupportFunction>,
    pub factor: f64,
    pub shift: Point,
}

impl SupportFunction for AffineSupport {
    fn value(&self, x: &Point) -> f64 {
        self.factor * self.inner.value(x) + self.shift.dot(x)
    }

    fn gradient(&self, x: &Point) -> Option<Point> {
        self.inner.gradient(x).map(|g| g * self.factor + self.shift)
    }

    fn hessian(&self, x: &Point) -> Option<Matrix3<f64>> {
        self.inner.hessian(x).map(|h| h * self.factor)
    }

    fn scale(&self) -> f64 {
        self.factor.abs() * self.inner.scale()
    }

    fn describe(&self) -> String {
        format!("{}·{} + shift", self.factor, self.inner.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(h: &dyn SupportFunction, x: &Point, step: f64) -> Point {
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = step;
            g[i] = (h.value(&(x + e)) - h.value(&(x - e))) / (2.0 * step);
        }
        g
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let x = Vector3::new(0.3, -0.5, 0.8).normalize();
        let bodies: Vec<Box<dyn SupportFunction>> = vec![
            Box::new(BallSupport {
                center: Vector3::new(0.1, 0.2, 0.3),
                radius: 2.0,
            }),
            Box::new(EllipsoidSupport::new(&[1.0, 1.5, 2.0])),
            Box::new(BumpySupport {
                base: 1.0,
                bumps: vec![Bump {
                    direction: Vector3::new(0.0, 0.6, 0.8),
                    amplitude: 0.04,
                    sharpness: 3.0,
                }],
            }),
        ];
        for h in &bodies {
            let g = h.gradient(&x).unwrap();
            assert!((g - fd_gradient(h.as_ref(), &x, 1e-6)).norm() < 1e-8, "{}", h.describe());
            // Euler: x·∇h(x) = h(x).
            assert!((g.dot(&x) - h.value(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipsoid_hessian_matches_differences() {
        let h = EllipsoidSupport::new(&[1.0, 1.0, 2.0]);
        let x = Vector3::new(0.2, 0.4, 0.9);
        let hess = h.hessian(&x).unwrap();
        let step = 1e-5;
        for j in 0..3 {
            let mut e = Vector3::zeros();
            e[j] = step;
            let col = (h.gradient(&(x + e)).unwrap() - h.gradient(&(x - e)).unwrap()) / (2.0 * step);
            assert!((hess.column(j) - col).norm() < 1e-8);
        }
    }
}
