//! Canonical body descriptions, closed-form reference values for balls and
//! the two-cap body, and the divergence-theorem volume of a closed mesh.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};
use crate::mesh::generate::{self, CapMeshResolution};
use crate::mesh::{BoundaryMesh, TriMesh};
use crate::smooth::hk::{HkReport, HkVerdict};
use crate::smooth::support::SupportFunction;

/// A closed set that is not one of the analytic kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledSet {
    /// Finitely many points.
    Points(Vec<Point>),
    /// Union of grid cells `[c·size, (c+1)·size]`.
    Voxels { cells: Vec<[i64; 3]>, size: f64 },
    /// Solid enclosed by a closed oriented triangle mesh.
    Mesh(TriMesh),
    /// Union of other bodies.
    Union(Vec<Body>),
}

#[derive(Clone)]
pub enum BodyKind {
    Ball { center: Point, radius: f64 },
    /// Origin-centred, axis-aligned; `semi_axes.len()` is the ambient dimension.
    Ellipsoid { semi_axes: Vec<f64> },
    SupportSmooth(Arc<dyn SupportFunction>),
    Polytope { vertices: Vec<Point> },
    CapBody { epsilon: f64 },
    SampledSet(SampledSet),
}

impl fmt::Debug for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyKind::Ball { center, radius } => f
                .debug_struct("Ball")
                .field("center", &[center.x, center.y, center.z])
                .field("radius", radius)
                .finish(),
            BodyKind::Ellipsoid { semi_axes } => {
                f.debug_struct("Ellipsoid").field("semi_axes", semi_axes).finish()
            }
            BodyKind::SupportSmooth(h) => f.debug_tuple("SupportSmooth").field(&h.describe()).finish(),
            BodyKind::Polytope { vertices } => f
                .debug_struct("Polytope")
                .field("vertices", &vertices.len())
                .finish(),
            BodyKind::CapBody { epsilon } => f.debug_struct("CapBody").field("epsilon", epsilon).finish(),
            BodyKind::SampledSet(s) => f.debug_tuple("SampledSet").field(s).finish(),
        }
    }
}

impl PartialEq for BodyKind {
    fn eq(&self, other: &Self) -> bool {
        use BodyKind::*;
        match (self, other) {
            (Ball { center: a, radius: r }, Ball { center: b, radius: s }) => a == b && r == s,
            (Ellipsoid { semi_axes: a }, Ellipsoid { semi_axes: b }) => a == b,
            (SupportSmooth(a), SupportSmooth(b)) => Arc::ptr_eq(a, b),
            (Polytope { vertices: a }, Polytope { vertices: b }) => a == b,
            (CapBody { epsilon: a }, CapBody { epsilon: b }) => a == b,
            (SampledSet(a), SampledSet(b)) => a == b,
            _ => false,
        }
    }
}

/// A convex body or closed set in the plane or in space.
#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    kind: BodyKind,
    dim: Dim,
}

fn check_point(p: &Point, dim: Dim) -> Result<()> {
    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
        return Err(GeomError::domain("non-finite coordinate"));
    }
    if dim == Dim::Two && p.z != 0.0 {
        return Err(GeomError::domain("planar bodies must have z = 0"));
    }
    Ok(())
}

impl Body {
    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn ball(dim: Dim, center: Point, radius: f64) -> Result<Self> {
        check_point(&center, dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Body {
            kind: BodyKind::Ball { center, radius },
            dim,
        })
    }

    pub fn unit_ball(dim: Dim) -> Self {
        Body::ball(dim, Vector3::zeros(), 1.0).expect("unit ball is valid")
    }

    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        let dim = Dim::from_ambient(semi_axes.len())?;
        if let Some(a) = semi_axes.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(GeomError::domain(format!("semi-axes must be positive, got {a}")));
        }
        Ok(Body {
            kind: BodyKind::Ellipsoid {
                semi_axes: semi_axes.to_vec(),
            },
            dim,
        })
    }

    pub fn cap_body(dim: Dim, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(GeomError::domain(format!(
                "cap-body epsilon must lie strictly inside (0, 1), got {epsilon}"
            )));
        }
        Ok(Body {
            kind: BodyKind::CapBody { epsilon },
            dim,
        })
    }

    pub fn support_smooth(dim: Dim, h: Arc<dyn SupportFunction>) -> Self {
        Body {
            kind: BodyKind::SupportSmooth(h),
            dim,
        }
    }

    /// Polytope from its vertices; they must affinely span the ambient space.
    /// Convex position is checked when the face lattice is built.
    pub fn polytope(dim: Dim, vertices: Vec<Point>) -> Result<Self> {
        for v in &vertices {
            check_point(v, dim)?;
        }
        if affine_rank(&vertices) < dim.ambient() + 1 {
            return Err(GeomError::Degenerate(format!(
                "{} vertices do not affinely span R^{}",
                vertices.len(),
                dim.ambient()
            )));
        }
        Ok(Body {
            kind: BodyKind::Polytope { vertices },
            dim,
        })
    }

    pub fn sampled(dim: Dim, set: SampledSet) -> Result<Self> {
        match &set {
            SampledSet::Points(p) if p.is_empty() => {
                return Err(GeomError::domain("empty point set"));
            }
            SampledSet::Points(p) => {
                for q in p {
                    check_point(q, dim)?;
                }
            }
            SampledSet::Voxels { cells, size } => {
                if cells.is_empty() || !(*size > 0.0) {
                    return Err(GeomError::domain("voxel set needs cells and a positive size"));
                }
                if dim == Dim::Two && cells.iter().any(|c| c[2] != 0) {
                    return Err(GeomError::domain("planar voxel cells must have k = 0"));
                }
            }
            SampledSet::Mesh(m) => {
                if dim != Dim::Three {
                    return Err(GeomError::domain("mesh solids are spatial"));
                }
                m.check_closed_oriented()?;
            }
            SampledSet::Union(parts) => {
                if parts.is_empty() || parts.iter().any(|b| b.dim != dim) {
                    return Err(GeomError::domain("union parts must be nonempty and share the dimension"));
                }
            }
        }
        Ok(Body {
            kind: BodyKind::SampledSet(set),
            dim,
        })
    }

    pub fn unit_cube() -> Self {
        let vertices = (0..8)
            .map(|i| Vector3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        Body::polytope(Dim::Three, vertices).expect("cube is valid")
    }

    pub fn unit_square() -> Self {
        let vertices = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ];
        Body::polytope(Dim::Two, vertices).expect("square is valid")
    }

    /// Regular tetrahedron with unit edge length.
    pub fn regular_tetrahedron() -> Self {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let vertices = vec![
            Vector3::new(1.0, 1.0, 1.0) * s,
            Vector3::new(1.0, -1.0, -1.0) * s,
            Vector3::new(-1.0, 1.0, -1.0) * s,
            Vector3::new(-1.0, -1.0, 1.0) * s,
        ];
        Body::polytope(Dim::Three, vertices).expect("tetrahedron is valid")
    }

    /// L-tromino of unit cells (unit squares in the plane, unit cubes in space).
    pub fn l_tromino(dim: Dim) -> Self {
        Body::sampled(
            dim,
            SampledSet::Voxels {
                cells: vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]],
                size: 1.0,
            },
        )
        .expect("tromino is valid")
    }

    /// Boundary mesh generated on demand. `resolution` is the icosphere
    /// subdivision for round bodies; for cap bodies it scales the ring count.
    pub fn boundary_mesh(&self, resolution: u32) -> Result<BoundaryMesh> {
        match (&self.kind, self.dim) {
            (BodyKind::Ball { center, radius }, Dim::Three) => {
                Ok(BoundaryMesh::Surface(generate::sphere(*center, *radius, resolution)))
            }
            (BodyKind::Ball { center, radius }, Dim::Two) => Ok(BoundaryMesh::Curve(generate::circle(
                *center,
                *radius,
                8 << resolution,
            ))),
            (BodyKind::Ellipsoid { semi_axes }, Dim::Three) => Ok(BoundaryMesh::Surface(generate::ellipsoid(
                [semi_axes[0], semi_axes[1], semi_axes[2]],
                resolution,
            ))),
            (BodyKind::CapBody { epsilon }, Dim::Three) => {
                let scale = 1usize << resolution.min(6);
                let res = CapMeshResolution {
                    rings: 3 * scale,
                    segments: 12 * scale,
                    seam_band: 0.1,
                    band_rings: scale,
                };
                Ok(BoundaryMesh::Surface(generate::cap_body(*epsilon, res)))
            }
            (BodyKind::CapBody { epsilon }, Dim::Two) => {
                Ok(BoundaryMesh::Curve(generate::cap_body_curve(*epsilon, 8 << resolution)))
            }
            (BodyKind::Polytope { .. }, _) => {
                let lattice = crate::polytope::FaceLattice::build(self)?;
                Ok(lattice.boundary_mesh())
            }
            (BodyKind::SampledSet(SampledSet::Mesh(m)), _) => Ok(BoundaryMesh::Surface(m.clone())),
            _ => Err(GeomError::Unsupported(format!(
                "no boundary mesh generator for {:?} in dimension {}",
                self.kind,
                self.dim.ambient()
            ))),
        }
    }
}

fn affine_rank(points: &[Point]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let mut cov = Matrix3::zeros();
    let scale = points
        .iter()
        .map(|p| (p - first).norm())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 1;
    }
    for p in points {
        let d = (p - first) / scale;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigenvalues();
    1 + eig.iter().filter(|&&e| e > 1e-12).count()
}

/// Areas and volumes of one half of the two-cap body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapBodyMetrics {
    pub n: usize,
    pub epsilon: f64,
    /// `H^n` of one spherical cap.
    pub cap_area: f64,
    /// `H^n` of the flat disc closing the cap.
    pub disc_area: f64,
    /// Volume of one half.
    pub half_volume: f64,
    /// `H^n(∂K_ε) / ((n+1) · L^{n+1}(K_ε))`.
    pub ratio: f64,
}

impl CapBodyMetrics {
    /// `(n+1)·half_volume − (cap_area − ε·disc_area)`; zero up to round-off.
    pub fn divergence_defect(&self) -> f64 {
        (self.n as f64 + 1.0) * self.half_volume - (self.cap_area - self.epsilon * self.disc_area)
    }

    pub fn boundary_area(&self) -> f64 {
        2.0 * self.cap_area
    }

    pub fn volume(&self) -> f64 {
        2.0 * self.half_volume
    }
}

/// Closed-form cap-body metrics for `n ∈ {1, 2}`.
pub fn cap_body_metrics(n: usize, epsilon: f64) -> Result<CapBodyMetrics> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(GeomError::domain(format!(
            "cap-body epsilon must lie strictly inside (0, 1), got {epsilon}"
        )));
    }
    let chord = (1.0 - epsilon * epsilon).sqrt();
    let (cap_area, disc_area, half_volume) = match n {
        1 => {
            let arc = epsilon.acos();
            (2.0 * arc, 2.0 * chord, arc - epsilon * chord)
        }
        2 => {
            let height = 1.0 - epsilon;
            (
                2.0 * PI * height,
                PI * chord * chord,
                PI * height * height * (2.0 + epsilon) / 3.0,
            )
        }
        _ => {
            return Err(GeomError::domain(format!(
                "cap-body metrics only for n = 1 or 2, got {n}"
            )))
        }
    };
    Ok(CapBodyMetrics {
        n,
        epsilon,
        cap_area,
        disc_area,
        half_volume,
        ratio: cap_area / ((n as f64 + 1.0) * half_volume),
    })
}

/// Volume enclosed by a closed, consistently oriented boundary mesh:
/// `(1/(n+1)) Σ (facet centroid · outward normal) · facet measure`.
pub fn divergence_volume(mesh: &BoundaryMesh) -> Result<f64> {
    mesh.check_closed_oriented()?;
    let volume = mesh.signed_volume();
    let scale = mesh
        .measure()
        .powf(mesh.dim().ambient() as f64 / mesh.dim().n() as f64);
    if volume < -1e-12 * scale {
        return Err(GeomError::Orientation(format!(
            "signed volume {volume:e} is negative; mesh is oriented inward"
        )));
    }
    Ok(volume)
}

/// Exact Heintze–Karcher quantities of a ball of radius `r` bounded by an
/// `n`-sphere.
pub fn reference_ball_report(n: usize, r: f64) -> Result<HkReport> {
    let dim = Dim::from_boundary(n)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(GeomError::domain(format!("radius must be positive, got {r}")));
    }
    let nf = n as f64;
    let volume = dim.unit_ball_volume() * r.powi(n as i32 + 1);
    let area = dim.sphere_measure() * r.powi(n as i32);
    let hk_integral = area * r / nf;
    Ok(HkReport {
        volume,
        area,
        hk_integral,
        gap: nf / (nf + 1.0) * hk_integral - volume,
        quadrature_level: 0,
        verdict: HkVerdict::EqualityBall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Polyline;

    #[test]
    fn ratio_at_half_is_one_point_six() {
        let m = cap_body_metrics(2, 0.5).unwrap();
        assert!((m.ratio - 1.6).abs() < 1e-12);
        // 2 − 3ε + ε³ = (1 − ε)²(2 + ε) on a grid of ε.
        for i in 1..100 {
            let e = i as f64 / 100.0;
            assert!((2.0 - 3.0 * e + e.powi(3) - (1.0 - e).powi(2) * (2.0 + e)).abs() < 1e-14);
            let m = cap_body_metrics(2, e).unwrap();
            assert!((m.ratio - 2.0 / ((1.0 - e) * (2.0 + e))).abs() < 1e-12 * m.ratio);
        }
    }

    #[test]
    fn cap_areas_at_half() {
        let m = cap_body_metrics(2, 0.5).unwrap();
        assert!((m.cap_area - PI).abs() < 1e-15);
        assert!((m.disc_area - 0.75 * PI).abs() < 1e-15);
        assert!(m.divergence_defect().abs() < 1e-12);
    }

    #[test]
    fn cap_metrics_reject_bad_input() {
        assert!(cap_body_metrics(2, 0.0).is_err());
        assert!(cap_body_metrics(2, 1.0).is_err());
        assert!(cap_body_metrics(3, 0.5).is_err());
        assert!(Body::cap_body(Dim::Three, 1.2).is_err());
    }

    #[test]
    fn small_epsilon_tends_to_ball() {
        for n in [1, 2] {
            let m = cap_body_metrics(n, 1e-9).unwrap();
            assert!((m.ratio - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn brute_force_cap_integration() {
        // Independent route: integrate the cap surface and the solid by
        // midpoint rules in the polar angle.
        let e: f64 = 0.5;
        let tm = e.acos();
        let steps = 200_000;
        let dt = tm / steps as f64;
        let mut area = 0.0;
        let mut vol = 0.0;
        for i in 0..steps {
            let t = (i as f64 + 0.5) * dt;
            area += 2.0 * PI * t.sin() * dt;
        }
        let dz = (1.0 - e) / steps as f64;
        for i in 0..steps {
            let z = e + (i as f64 + 0.5) * dz;
            vol += PI * (1.0 - z * z) * dz;
        }
        let m = cap_body_metrics(2, e).unwrap();
        assert!((area - m.cap_area).abs() < 1e-9);
        assert!((vol - m.half_volume).abs() < 1e-9);
        assert!((3.0 * vol - (area - e * m.disc_area)).abs() < 1e-8);
    }

    #[test]
    fn cube_and_sphere_divergence_volume() {
        let cube = BoundaryMesh::Surface(generate::box_mesh(Vector3::zeros(), Vector3::repeat(1.0)));
        assert!((divergence_volume(&cube).unwrap() - 1.0).abs() < 1e-15);
        let sphere = BoundaryMesh::Surface(generate::icosphere(4));
        let v = divergence_volume(&sphere).unwrap();
        assert!((v / (4.0 * PI / 3.0) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn inward_mesh_is_an_orientation_error() {
        let mut m = generate::icosphere(1);
        m.flip();
        assert!(matches!(
            divergence_volume(&BoundaryMesh::Surface(m)),
            Err(GeomError::Orientation(_))
        ));
    }

    #[test]
    fn polygon_divergence_volume() {
        let sq = Polyline::closed(vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
            Vector3::new(2.0, 1.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ]);
        assert!((divergence_volume(&BoundaryMesh::Curve(sq)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ball_reports() {
        let r = reference_ball_report(2, 1.0).unwrap();
        assert!((r.volume - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((r.hk_integral - 2.0 * PI).abs() < 1e-15);
        assert!(r.gap.abs() < 1e-15);
        let r = reference_ball_report(1, 2.0).unwrap();
        assert!((r.volume - 4.0 * PI).abs() < 1e-14);
        assert!((r.hk_integral - 8.0 * PI).abs() < 1e-14);
        assert!(r.gap.abs() < 1e-14);
        assert!(reference_ball_report(2, 3.0).unwrap().gap.abs() < 1e-12);
        assert!(reference_ball_report(2, -1.0).is_err());
    }

    #[test]
    fn polytope_needs_full_span() {
        let flat = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(
            Body::polytope(Dim::Three, flat),
            Err(GeomError::Degenerate(_))
        ));
    }
}
