//! Reverse Gauss map, principal radii and surface integrals of a smooth
//! convex body given by its support function.

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::SphereQuadrature;
use super::support::{AffineSupport, BallSupport, EllipsoidSupport, SupportFunction};
use crate::bodies::{Body, BodyKind};
use crate::error::{GeomError, Result};
use crate::geometry::{normalized, tangent_basis, Dim, Point};
use crate::symmetric::elementary_symmetric;

/// Relative finite-difference step for Hessians built from gradients.
pub const GRADIENT_FD_STEP: f64 = 1e-5;
/// Relative step for second differences of values alone.
pub const VALUE_FD_STEP: f64 = 1e-4;
/// Eigenvalues of the restricted Hessian below `CONVEXITY_FLOOR · scale`
/// reject the body.
pub const CONVEXITY_FLOOR: f64 = 1e-8;

/// Curvature data at the boundary point with outer normal `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPointData {
    pub u: [f64; 3],
    pub x: [f64; 3],
    /// Principal radii, ascending.
    pub radii: Vec<f64>,
    /// `1 / radii`, in the same order.
    pub curvatures: Vec<f64>,
    /// `Π radii` times the node's quadrature weight (weight 1 for a single
    /// evaluation).
    pub area_weight: f64,
}

impl BoundaryPointData {
    pub fn normal(&self) -> Point {
        Vector3::from(self.u)
    }

    pub fn point(&self) -> Point {
        Vector3::from(self.x)
    }

    /// `x · u`, which equals `h(u)`.
    pub fn support_value(&self) -> f64 {
        self.point().dot(&self.normal())
    }

    pub fn n(&self) -> usize {
        self.radii.len()
    }
}

/// `H_k = e_k(κ₁, …, κ_n)`; `H₀ = 1`.
pub fn pointwise_mean_curvature(data: &BoundaryPointData, k: usize) -> Result<f64> {
    elementary_symmetric(&data.curvatures, k)
}

/// A support function bound to an ambient dimension, translated so that the
/// origin is interior, and screened for positive curvature at every node of
/// a quadrature rule.
#[derive(Clone, Debug)]
pub struct SupportEvaluator {
    dim: Dim,
    h: Arc<dyn SupportFunction>,
    quadrature: SphereQuadrature,
    convexity_certificate: bool,
}

impl SupportEvaluator {
    /// Builds the evaluator and screens convexity on the level-`level` rule.
    pub fn new(dim: Dim, h: Arc<dyn SupportFunction>, level: u32) -> Result<Self> {
        let quadrature = SphereQuadrature::new(dim, level);
        let mut ev = SupportEvaluator {
            dim,
            h,
            quadrature,
            convexity_certificate: false,
        };
        ev.center_origin()?;
        ev.screen_convexity()?;
        Ok(ev)
    }

    pub fn from_body(body: &Body, level: u32) -> Result<Self> {
        let h: Arc<dyn SupportFunction> = match body.kind() {
            BodyKind::Ball { center, radius } => Arc::new(BallSupport {
                center: *center,
                radius: *radius,
            }),
            BodyKind::Ellipsoid { semi_axes } => Arc::new(EllipsoidSupport::new(semi_axes)),
            BodyKind::SupportSmooth(h) => h.clone(),
            other => {
                return Err(GeomError::Unsupported(format!(
                    "{other:?} has no smooth support function"
                )))
            }
        };
        SupportEvaluator::new(body.dim(), h, level)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.quadrature.level
    }

    pub fn quadrature(&self) -> &SphereQuadrature {
        &self.quadrature
    }

    pub fn support(&self) -> &Arc<dyn SupportFunction> {
        &self.h
    }

    pub fn scale(&self) -> f64 {
        self.h.scale()
    }

    pub fn convexity_certificate(&self) -> bool {
        self.convexity_certificate
    }

    /// Same body, rescaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let h = Arc::new(AffineSupport {
            inner: self.h.clone(),
            factor,
            shift: Vector3::zeros(),
        });
        SupportEvaluator::new(self.dim, h, self.level())
    }

    /// Same body translated by `shift`.
    pub fn translated(&self, shift: Point) -> Result<Self> {
        let h = Arc::new(AffineSupport {
            inner: self.h.clone(),
            factor: 1.0,
            shift: self.dim.project(shift),
        });
        SupportEvaluator::new(self.dim, h, self.level())
    }

    pub fn value(&self, u: &Point) -> f64 {
        self.h.value(u)
    }

    /// Translates the body when `h` is not positive on every node, moving the
    /// mean of the boundary points to the origin.
    fn center_origin(&mut self) -> Result<()> {
        let min_h = self
            .quadrature
            .nodes
            .iter()
            .map(|u| self.h.value(u))
            .fold(f64::INFINITY, f64::min);
        if min_h > 0.0 {
            return Ok(());
        }
        let total: f64 = self.quadrature.weights.iter().sum();
        let mean = self
            .quadrature
            .nodes
            .iter()
            .zip(&self.quadrature.weights)
            .map(|(u, w)| self.gradient(u) * *w)
            .sum::<Point>()
            / total;
        self.h = Arc::new(AffineSupport {
            inner: self.h.clone(),
            factor: 1.0,
            shift: -self.dim.project(mean),
        });
        let min_h = self
            .quadrature
            .nodes
            .iter()
            .map(|u| self.h.value(u))
            .fold(f64::INFINITY, f64::min);
        if min_h > 0.0 {
            Ok(())
        } else {
            Err(GeomError::domain("support function cannot be made positive by translation"))
        }
    }

    fn screen_convexity(&mut self) -> Result<()> {
        let nodes = &self.quadrature.nodes;
        let result: Result<Vec<()>> = nodes
            .par_iter()
            .map(|u| self.radii_unchecked(u).map(|_| ()))
            .collect();
        result?;
        self.convexity_certificate = true;
        Ok(())
    }

    fn active_axes(&self) -> usize {
        self.dim.ambient()
    }

    pub fn gradient(&self, x: &Point) -> Point {
        if let Some(g) = self.h.gradient(x) {
            return self.dim.project(g);
        }
        let step = GRADIENT_FD_STEP * self.scale();
        let mut g = Vector3::zeros();
        for i in 0..self.active_axes() {
            let mut e = Vector3::zeros();
            e[i] = step;
            g[i] = (self.h.value(&(x + e)) - self.h.value(&(x - e))) / (2.0 * step);
        }
        g
    }

    pub fn hessian(&self, x: &Point) -> Matrix3<f64> {
        if let Some(h) = self.h.hessian(x) {
            return h;
        }
        let d = self.active_axes();
        let mut hess = Matrix3::zeros();
        if self.h.gradient(x).is_some() {
            let step = GRADIENT_FD_STEP * self.scale();
            for j in 0..d {
                let mut e = Vector3::zeros();
                e[j] = step;
                let col = (self.gradient(&(x + e)) - self.gradient(&(x - e))) / (2.0 * step);
                for i in 0..d {
                    hess[(i, j)] = col[i];
                }
            }
            return (hess + hess.transpose()) * 0.5;
        }
        let step = VALUE_FD_STEP * self.scale();
        let f = |p: Point| self.h.value(&p);
        let f0 = f(*x);
        for i in 0..d {
            let mut ei = Vector3::zeros();
            ei[i] = step;
            hess[(i, i)] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (step * step);
            for j in 0..i {
                let mut ej = Vector3::zeros();
                ej[j] = step;
                let v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej))
                    / (4.0 * step * step);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        hess
    }

    /// Ascending principal radii at unit `u`, checked against the floor.
    fn radii_unchecked(&self, u: &Point) -> Result<Vec<f64>> {
        let hess = self.hessian(u);
        let basis = tangent_basis(u, self.dim);
        let mut radii = match self.dim {
            Dim::Two => vec![basis[0].dot(&(hess * basis[0]))],
            Dim::Three => {
                let restricted = Matrix2::new(
                    basis[0].dot(&(hess * basis[0])),
                    basis[0].dot(&(hess * basis[1])),
                    basis[1].dot(&(hess * basis[0])),
                    basis[1].dot(&(hess * basis[1])),
                );
                let (a, b, c) = (restricted[(0, 0)], 0.5 * (restricted[(0, 1)] + restricted[(1, 0)]), restricted[(1, 1)]);
                let mean = 0.5 * (a + c);
                let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                vec![mean - disc, mean + disc]
            }
        };
        radii.sort_by(|a, b| a.total_cmp(b));
        let threshold = CONVEXITY_FLOOR * self.scale();
        if let Some(&bad) = radii.iter().find(|&&r| !(r > threshold)) {
            return Err(GeomError::ConvexityViolation {
                direction: [u.x, u.y, u.z],
                eigenvalue: bad,
                threshold,
            });
        }
        Ok(radii)
    }

    /// Principal data at the unit direction `u`.
    pub fn principal_data(&self, u: &Point) -> Result<BoundaryPointData> {
        if !self.convexity_certificate {
            return Err(GeomError::domain("convexity has not been certified"));
        }
        let u = normalized(&self.dim.project(*u))?;
        self.data_at(&u, 1.0)
    }

    fn data_at(&self, u: &Point, weight: f64) -> Result<BoundaryPointData> {
        let radii = self.radii_unchecked(u)?;
        let x = self.gradient(u);
        let jac: f64 = radii.iter().product();
        Ok(BoundaryPointData {
            u: [u.x, u.y, u.z],
            x: [x.x, x.y, x.z],
            curvatures: radii.iter().map(|r| 1.0 / r).collect(),
            radii,
            area_weight: jac * weight,
        })
    }

    /// Principal data at every quadrature node, in node order.
    pub fn samples(&self) -> Result<Vec<BoundaryPointData>> {
        self.quadrature
            .nodes
            .par_iter()
            .zip(self.quadrature.weights.par_iter())
            .map(|(u, &w)| self.data_at(u, w))
            .collect()
    }

    /// `Σ area_weight · f(data)` over the nodes, accumulated in node order.
    pub fn surface_integral(&self, f: impl Fn(&BoundaryPointData) -> f64) -> Result<f64> {
        Ok(integrate_samples(&self.samples()?, f))
    }

    pub fn area(&self) -> Result<f64> {
        self.surface_integral(|_| 1.0)
    }

    /// Divergence-theorem volume `∫ (x·u)/(n+1)`.
    pub fn volume(&self) -> Result<f64> {
        let n1 = self.dim.ambient() as f64;
        self.surface_integral(|d| d.support_value() / n1)
    }
}

pub fn integrate_samples(samples: &[BoundaryPointData], f: impl Fn(&BoundaryPointData) -> f64) -> f64 {
    samples.iter().map(|d| d.area_weight * f(d)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ellipsoid_112() -> SupportEvaluator {
        SupportEvaluator::from_body(&Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap(), 3).unwrap()
    }

    #[test]
    fn ball_radii_and_point() {
        let b = Body::ball(Dim::Three, Vector3::zeros(), 2.5).unwrap();
        let ev = SupportEvaluator::from_body(&b, 2).unwrap();
        let u = Vector3::new(1.0, 2.0, -2.0) / 3.0;
        let d = ev.principal_data(&u).unwrap();
        for r in &d.radii {
            assert!((r - 2.5).abs() < 1e-12);
        }
        assert!((d.point() - u * 2.5).norm() < 1e-12);
    }

    #[test]
    fn ellipsoid_pole_radii_by_finite_differences() {
        // Oracle: second differences of h(u) = sqrt(u₁² + u₂² + 4u₃²) along
        // great circles through the pole give h'' + h = radius.
        let h = |u: Point| (u.x * u.x + u.y * u.y + 4.0 * u.z * u.z).sqrt();
        let step = 1e-5;
        let mut oracle = Vec::new();
        for t in [Vector3::x(), Vector3::y()] {
            let at = |s: f64| h(Vector3::z() * s.cos() + t * s.sin());
            let second = (at(step) - 2.0 * at(0.0) + at(-step)) / (step * step);
            oracle.push(second + at(0.0));
        }
        let d = ellipsoid_112().principal_data(&Vector3::z()).unwrap();
        for (r, o) in d.radii.iter().zip(&oracle) {
            assert!((r - o).abs() < 1e-4, "{r} vs {o}");
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert!((pointwise_mean_curvature(&d, 1).unwrap() - 4.0).abs() < 1e-10);
        // Equator: radii b²/a... = (1, 4).
        let e = ellipsoid_112().principal_data(&Vector3::x()).unwrap();
        assert!((e.radii[0] - 1.0).abs() < 1e-12 && (e.radii[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn translation_leaves_radii_unchanged() {
        let ev = ellipsoid_112();
        let moved = ev.translated(Vector3::new(3.0, -1.0, 0.5)).unwrap();
        let u = Vector3::new(0.2, 0.3, 0.9).normalize();
        let (a, b) = (ev.principal_data(&u).unwrap(), moved.principal_data(&u).unwrap());
        for (x, y) in a.radii.iter().zip(&b.radii) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn far_translation_is_recentred() {
        let b = Body::ball(Dim::Three, Vector3::new(5.0, 0.0, 0.0), 1.0).unwrap();
        let ev = SupportEvaluator::from_body(&b, 2).unwrap();
        let v = ev.volume().unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn finite_difference_fallback_matches_analytic() {
        #[derive(Debug)]
        struct ValueOnly(EllipsoidSupport);
        impl SupportFunction for ValueOnly {
            fn value(&self, x: &Point) -> f64 {
                self.0.value(x)
            }
            fn scale(&self) -> f64 {
                self.0.scale()
            }
            fn describe(&self) -> String {
                "value-only".into()
            }
        }
        let ev = SupportEvaluator::new(
            Dim::Three,
            Arc::new(ValueOnly(EllipsoidSupport::new(&[1.0, 1.5, 2.0]))),
            2,
        )
        .unwrap();
        let exact = SupportEvaluator::from_body(&Body::ellipsoid(&[1.0, 1.5, 2.0]).unwrap(), 2).unwrap();
        let u = Vector3::new(0.5, -0.5, 0.7).normalize();
        let (a, b) = (ev.principal_data(&u).unwrap(), exact.principal_data(&u).unwrap());
        for (x, y) in a.radii.iter().zip(&b.radii) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn non_convex_support_is_rejected() {
        #[derive(Debug)]
        struct Dented;
        impl SupportFunction for Dented {
            fn value(&self, x: &Point) -> f64 {
                let r = x.norm();
                let u = x / r;
                r * (1.0 + 0.5 * (8.0 * (u.z - 1.0)).exp())
            }
            fn scale(&self) -> f64 {
                1.0
            }
            fn describe(&self) -> String {
                "dented".into()
            }
        }
        let err = SupportEvaluator::new(Dim::Three, Arc::new(Dented), 3).unwrap_err();
        assert!(matches!(err, GeomError::ConvexityViolation { .. }), "{err}");
    }

    #[test]
    fn circle_in_the_plane() {
        let b = Body::ball(Dim::Two, Vector3::zeros(), 2.0).unwrap();
        let ev = SupportEvaluator::from_body(&b, 3).unwrap();
        assert!((ev.area().unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((ev.volume().unwrap() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_integrals_at_level_five() {
        let ev = SupportEvaluator::from_body(&Body::unit_ball(Dim::Three), 5).unwrap();
        assert!((ev.area().unwrap() - 4.0 * PI).abs() < 1e-6);
        assert!((ev.volume().unwrap() - 4.0 * PI / 3.0).abs() < 1e-6);
    }
}
