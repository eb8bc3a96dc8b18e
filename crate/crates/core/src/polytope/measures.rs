//! Curvature measure totals `C_k`, their absolutely continuous and singular
//! parts, and the Steiner polynomial they determine.
//!
//! Normalisation: `C_k(K, ·)` integrates `H̄_{n−k}` over the normal bundle
//! with no binomial or ball-volume prefactor, so `C_n` is the boundary area,
//! `C_0` is `H^n(S^n)` for every convex body, and for a smooth body
//! `C_k = ∫_{∂K} H_{n−k}`. On a polytope only the `k`-faces contribute to
//! `C_k`, each with weight `H^k(F) · H^{n−k}(N(P, F) ∩ S^n)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::FaceLattice;
use crate::bodies::cap_body_metrics;
use crate::error::{GeomError, Result};
use crate::geometry::Dim;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceContribution {
    pub face: usize,
    pub face_measure: f64,
    pub cone_measure: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMeasureReport {
    pub k: usize,
    pub total: f64,
    pub ac_part: f64,
    pub sing_part: f64,
    pub per_face: Vec<FaceContribution>,
}

pub fn curvature_measure_total(lattice: &FaceLattice, k: usize) -> Result<CurvatureMeasureReport> {
    let n = lattice.n();
    if k > n {
        return Err(GeomError::Index { k, n });
    }
    let mut per_face = Vec::new();
    for face in lattice.faces_of_dim(k) {
        let cone = lattice.normal_cone_measure(face)?.spherical_measure;
        let measure = lattice.face_measure(face);
        per_face.push(FaceContribution {
            face,
            face_measure: measure,
            cone_measure: cone,
            mass: measure * cone,
        });
    }
    let total: f64 = per_face.iter().map(|f| f.mass).sum();
    // Flat facets carry zero pointwise curvature: C_k is singular for k < n.
    let ac_part = if k == n { total } else { 0.0 };
    Ok(CurvatureMeasureReport {
        k,
        total,
        ac_part,
        sing_part: total - ac_part,
        per_face,
    })
}

/// Reports for every `k = 0..=n`.
pub fn all_measures(lattice: &FaceLattice) -> Result<Vec<CurvatureMeasureReport>> {
    (0..=lattice.n()).map(|k| curvature_measure_total(lattice, k)).collect()
}

/// `V(ρ) = Σ coefficients[j] ρʲ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerPolynomial {
    pub coefficients: Vec<f64>,
}

impl SteinerPolynomial {
    pub fn evaluate(&self, rho: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * rho + c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `V(K_ρ) = V(K) + Σ_k ρ^{n+1−k}/(n+1−k) · C_k` from the volume and one
/// report per `k = 0..=n`.
pub fn steiner_coefficients_from_measures(
    volume: f64,
    reports: &[CurvatureMeasureReport],
) -> Result<SteinerPolynomial> {
    let n = reports.iter().map(|r| r.k).max().unwrap_or(0);
    if n == 0 {
        return Err(GeomError::domain("need curvature measures for k = 0..=n with n ≥ 1"));
    }
    let mut coefficients = vec![f64::NAN; n + 2];
    coefficients[0] = volume;
    for r in reports {
        coefficients[n + 1 - r.k] = r.total / (n + 1 - r.k) as f64;
    }
    if let Some(j) = coefficients.iter().position(|c| c.is_nan()) {
        return Err(GeomError::domain(format!("missing curvature measure for k = {}", n + 1 - j)));
    }
    Ok(SteinerPolynomial { coefficients })
}

/// Singular `C₁` mass carried by the seam circle of the spatial cap body:
/// seam length times the angle between the two cap normals along the seam.
pub fn singular_seam_mass(epsilon: f64) -> Result<f64> {
    cap_body_metrics(2, epsilon)?;
    let seam_radius = (1.0 - epsilon * epsilon).sqrt();
    Ok(2.0 * PI * seam_radius * seam_angle(epsilon))
}

/// Angle between the cap normals `(√(1−ε²), ±ε)` meeting at the seam.
pub fn seam_angle(epsilon: f64) -> f64 {
    2.0 * epsilon.asin()
}

/// Curvature measures of the cap body. The caps are pieces of the unit
/// sphere, so their densities are binomial coefficients; the seam (a circle
/// in space, two corner points in the plane) carries the singular parts.
pub fn cap_body_measures(dim: Dim, epsilon: f64) -> Result<Vec<CurvatureMeasureReport>> {
    let n = dim.n();
    let metrics = cap_body_metrics(n, epsilon)?;
    let caps = 2.0 * metrics.cap_area;
    let angle = seam_angle(epsilon);
    let report = |k: usize, ac: f64, sing: f64| CurvatureMeasureReport {
        k,
        total: ac + sing,
        ac_part: ac,
        sing_part: sing,
        per_face: Vec::new(),
    };
    Ok(match dim {
        Dim::Two => vec![
            // Corners: two points, each with a normal arc of length `angle`.
            report(0, caps, 2.0 * angle),
            report(1, caps, 0.0),
        ],
        Dim::Three => {
            let r = (1.0 - epsilon * epsilon).sqrt();
            vec![
                // Seam normals at angle θ from the seam plane see a normal
                // curvature cos θ / r; integrating over the arc gives 4πε.
                report(0, caps, 2.0 * PI * r * 2.0 * (angle / 2.0).sin() / r),
                report(1, 2.0 * caps, singular_seam_mass(epsilon)?),
                report(2, caps, 0.0),
            ]
        }
    })
}

/// CSV summary with a versioned header comment line.
pub fn measures_csv(reports: &[CurvatureMeasureReport]) -> String {
    let mut s = String::from("# convexlab curvature measures v1\nk,total,ac,sing\n");
    for r in reports {
        let _ = writeln!(s, "{},{:.17e},{:.17e},{:.17e}", r.k, r.total, r.ac_part, r.sing_part);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;

    #[test]
    fn cube_totals() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        let m = all_measures(&cube).unwrap();
        let want = [4.0 * PI, 6.0 * PI, 6.0];
        for (r, w) in m.iter().zip(want) {
            assert!((r.total - w).abs() < 1e-12, "k={} {}", r.k, r.total);
            assert_eq!(r.total, r.ac_part + r.sing_part);
        }
        assert_eq!(m[0].ac_part, 0.0);
        assert_eq!(m[2].sing_part, 0.0);
    }

    #[test]
    fn square_steiner() {
        let sq = FaceLattice::build(&Body::unit_square()).unwrap();
        let p = steiner_coefficients_from_measures(sq.volume(), &all_measures(&sq).unwrap()).unwrap();
        for (c, w) in p.coefficients.iter().zip([1.0, 4.0, PI]) {
            assert!((c - w).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_steiner_coefficients() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        let p = steiner_coefficients_from_measures(cube.volume(), &all_measures(&cube).unwrap()).unwrap();
        for (c, w) in p.coefficients.iter().zip([1.0, 6.0, 3.0 * PI, 4.0 * PI / 3.0]) {
            assert!((c - w).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_steiner_is_binomial() {
        let rep = |k, total| CurvatureMeasureReport {
            k,
            total,
            ac_part: total,
            sing_part: 0.0,
            per_face: vec![],
        };
        let m = [rep(0, 4.0 * PI), rep(1, 8.0 * PI), rep(2, 4.0 * PI)];
        let p = steiner_coefficients_from_measures(4.0 * PI / 3.0, &m).unwrap();
        for rho in [0.1, 0.7, 2.0] {
            assert!((p.evaluate(rho) - 4.0 * PI / 3.0 * (1.0 + rho).powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_body_gauss_curvature_closes_up() {
        for eps in [0.1, 0.5, 0.9] {
            for dim in [Dim::Two, Dim::Three] {
                let m = cap_body_measures(dim, eps).unwrap();
                assert!((m[0].total - dim.sphere_measure()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seam_mass_limits() {
        let m = singular_seam_mass(0.5).unwrap();
        assert!((m - PI * 3f64.sqrt() * PI / 3.0).abs() < 1e-12);
        assert!(singular_seam_mass(1e-9).unwrap() < 1e-7);
        assert!(singular_seam_mass(1.0 - 1e-12).unwrap() < 1e-4);
        assert!(singular_seam_mass(0.0).is_err());
    }

    #[test]
    fn csv_has_header() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        let csv = measures_csv(&all_measures(&cube).unwrap());
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "k,total,ac,sing");
        assert_eq!(csv.lines().count(), 5);
    }
}
