//! Curvature of parallel surfaces.
//!
//! Convention: for a convex body `K` with principal curvatures `κⱼ ≥ 0` we
//! build outer parallel surfaces at distance `r`, whose curvatures are
//! `κⱼ / (1 + rκⱼ)`. The complement `C` of the interior of `K` has the
//! opposite normal, so its curvatures are `−κⱼ`, and the same surface seen
//! from `C` is an inner parallel set with curvatures `−κⱼ / (1 + rκⱼ)`.

use serde::{Deserialize, Serialize};

use super::level_set::curve_curvatures;
use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};
use crate::mesh::{generate, Polyline, TriMesh};
use crate::smooth::SupportEvaluator;
use crate::umbilic::ShapeEstimator;

/// Curvature at distance `r` along the normal of a boundary point with
/// curvature `kappa`, both measured with the same normal.
pub fn parallel_curvature(kappa: f64, r: f64) -> f64 {
    kappa / (1.0 + r * kappa)
}

/// Curvature of the outer parallel surface of `K` at distance `r`, in the
/// sign convention of the complement: `κ_C = −κ` moved inward by `r` along
/// the complement's normal.
pub fn complement_curvature(kappa: f64, r: f64) -> f64 {
    let kappa_c = -kappa;
    kappa_c / (1.0 - r * kappa_c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetCurvatureReport {
    pub r: f64,
    pub vertices: usize,
    /// Vertices whose neighbourhood could not be fitted.
    pub skipped: usize,
    /// `max |χ̂ − χ| / max χ` per vertex, maximised over vertices.
    pub max_relative_deviation: f64,
}

/// Per-vertex curvatures of a surface from its vertices and normals.
type CurvatureBuilder = dyn Fn(Vec<Point>, Vec<Point>) -> Vec<Option<Vec<f64>>>;

/// Builds the parallel surface `x(u) + r u` over the sphere mesh of the given
/// subdivision, estimates its curvatures from the mesh and compares them
/// with the transformed curvatures of the body.
pub fn offset_curvature_check(body: &SupportEvaluator, r: f64, subdivision: u32) -> Result<OffsetCurvatureReport> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(GeomError::domain(format!("offset distance must be nonnegative, got {r}")));
    }
    let (directions, build): (Vec<Point>, Box<CurvatureBuilder>) =
        match body.dim() {
            Dim::Three => {
                let sphere = generate::icosphere(subdivision);
                let tris = sphere.triangles.clone();
                (
                    sphere.vertices,
                    Box::new(move |pts, normals| {
                        let mesh = TriMesh::new(pts, tris.clone()).with_normals(normals);
                        let est = ShapeEstimator::new(&mesh);
                        (0..mesh.vertices.len())
                            .map(|v| est.sample(v).ok().map(|s| s.principal_curvatures().to_vec()))
                            .collect()
                    }),
                )
            }
            Dim::Two => {
                let circle = generate::circle(Point::zeros(), 1.0, 8 << subdivision);
                (
                    circle.vertices,
                    Box::new(|pts, normals| curve_curvatures(&Polyline::closed(pts), &normals)),
                )
            }
        };
    let data = directions
        .iter()
        .map(|u| body.principal_data(u))
        .collect::<Result<Vec<_>>>()?;
    let points = data.iter().map(|d| d.point() + d.normal() * r).collect();
    let normals = data.iter().map(|d| d.normal()).collect();
    let estimates = build(points, normals);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for (d, est) in data.iter().zip(&estimates) {
        let Some(est) = est else {
            skipped += 1;
            continue;
        };
        let mut predicted: Vec<f64> = d.curvatures.iter().map(|&k| parallel_curvature(k, r)).collect();
        predicted.sort_by(f64::total_cmp);
        let scale = predicted.iter().copied().fold(0.0, f64::max);
        for (p, e) in predicted.iter().zip(est) {
            worst = worst.max((e - p).abs() / scale);
        }
    }
    if skipped == data.len() {
        return Err(GeomError::RankDeficient { vertex: 0 });
    }
    Ok(OffsetCurvatureReport {
        r,
        vertices: data.len(),
        skipped,
        max_relative_deviation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;

    #[test]
    fn sign_convention() {
        // Unit sphere seen from the complement, pushed out by r.
        for r in [0.1, 0.5, 2.0] {
            assert!((complement_curvature(1.0, r) + 1.0 / (1.0 + r)).abs() < 1e-15);
            assert_eq!(complement_curvature(1.0, r), -parallel_curvature(1.0, r));
        }
        assert_eq!(parallel_curvature(0.0, 1.0), 0.0);
    }

    #[test]
    fn ball_offset_curvature() {
        let ev = SupportEvaluator::from_body(&Body::unit_ball(Dim::Three), 2).unwrap();
        let rep = offset_curvature_check(&ev, 0.5, 5).unwrap();
        assert!(rep.max_relative_deviation < 1e-3, "{rep:?}");
        let ev = SupportEvaluator::from_body(&Body::unit_ball(Dim::Two), 2).unwrap();
        let rep = offset_curvature_check(&ev, 0.5, 5).unwrap();
        assert!(rep.max_relative_deviation < 1e-3, "{rep:?}");
    }

    #[test]
    fn ellipsoid_offset_curvature() {
        let ev = SupportEvaluator::from_body(&Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap(), 2).unwrap();
        let rep = offset_curvature_check(&ev, 0.25, 5).unwrap();
        assert!(rep.max_relative_deviation < 2e-2, "{rep:?}");
        assert_eq!(rep.skipped, 0);
    }
}
