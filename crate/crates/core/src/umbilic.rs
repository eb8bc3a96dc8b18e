//! Umbilicity test for closed surfaces carried as triangle meshes with a
//! normal field, and the plane / sphere / neither classification.
//!
//! The shape operator at a vertex is the least-squares linear map taking
//! tangential position differences to tangential normal differences over
//! the 2-ring, then symmetrised. Explicit normals are used as given; only a
//! mesh without them falls back to face-averaged normals.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{orthonormal_pair, Point};
use crate::mesh::TriMesh;

/// Deviation and spread tolerance, relative to the curvature scale.
pub const UMBILIC_TOL: f64 = 1e-3;
/// Sphere fit tolerance, relative to the radius.
pub const SPHERE_FIT_TOL: f64 = 1e-3;
const MIN_NEIGHBOURS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeOperatorSample {
    pub vertex: usize,
    pub x: [f64; 3],
    pub normal: [f64; 3],
    /// Tangent frame the operator is expressed in.
    pub frame: [[f64; 3]; 2],
    pub operator: [[f64; 2]; 2],
    /// `trace / n`.
    pub mean_curvature: f64,
    /// `‖S − κ̂ I‖_F`.
    pub umbilic_deviation: f64,
}

impl ShapeOperatorSample {
    /// Principal curvatures, ascending.
    pub fn principal_curvatures(&self) -> [f64; 2] {
        let [[a, b], [_, c]] = self.operator;
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        [mean - disc, mean + disc]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    Plane,
    Sphere { center: [f64; 3], radius: f64 },
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmbilicVerdict {
    pub classification: Classification,
    pub vertex_count: usize,
    /// Vertices whose neighbourhood was too sparse to estimate.
    pub skipped_vertices: usize,
    pub max_deviation: f64,
    pub kappa_spread: f64,
    /// For spheres: `max | |x − c| − r |`; zero otherwise.
    pub fit_residual: f64,
    /// Curvature scale the tolerances are relative to.
    pub curvature_scale: f64,
}

/// Caches adjacency and normals so every vertex can be estimated in turn.
pub struct ShapeEstimator<'a> {
    mesh: &'a TriMesh,
    normals: Vec<Point>,
    adjacency: Vec<Vec<usize>>,
}

impl<'a> ShapeEstimator<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        ShapeEstimator {
            mesh,
            normals: mesh.vertex_normals(),
            adjacency: mesh.vertex_adjacency(),
        }
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    fn two_ring(&self, v: usize) -> Vec<usize> {
        let mut ring: Vec<usize> = self.adjacency[v]
            .iter()
            .flat_map(|&w| self.adjacency[w].iter().copied().chain(std::iter::once(w)))
            .filter(|&w| w != v)
            .collect();
        ring.sort_unstable();
        ring.dedup();
        ring
    }

    pub fn sample(&self, v: usize) -> Result<ShapeOperatorSample> {
        let ring = self.two_ring(v);
        if ring.len() < MIN_NEIGHBOURS {
            return Err(GeomError::RankDeficient { vertex: v });
        }
        let x = self.mesh.vertices[v];
        let eta = self.normals[v];
        let (t1, t2) = orthonormal_pair(&eta);
        let mut aa = Matrix2::zeros();
        let mut ba = Matrix2::zeros();
        for &w in &ring {
            let dx = self.mesh.vertices[w] - x;
            let dn = self.normals[w] - eta;
            let a = Vector2::new(t1.dot(&dx), t2.dot(&dx));
            let b = Vector2::new(t1.dot(&dn), t2.dot(&dn));
            aa += a * a.transpose();
            ba += b * a.transpose();
        }
        let eig = aa.symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 1e-10 * hi) {
            return Err(GeomError::RankDeficient { vertex: v });
        }
        let inv = aa.try_inverse().ok_or(GeomError::RankDeficient { vertex: v })?;
        let s = ba * inv;
        let s = (s + s.transpose()) * 0.5;
        let mean = 0.5 * s.trace();
        let deviation = (s - Matrix2::identity() * mean).norm();
        Ok(ShapeOperatorSample {
            vertex: v,
            x: [x.x, x.y, x.z],
            normal: [eta.x, eta.y, eta.z],
            frame: [[t1.x, t1.y, t1.z], [t2.x, t2.y, t2.z]],
            operator: [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]],
            mean_curvature: mean,
            umbilic_deviation: deviation,
        })
    }

    /// Samples for the given vertices, in order.
    pub fn samples(&self, vertices: &[usize]) -> Result<Vec<ShapeOperatorSample>> {
        vertices.par_iter().map(|&v| self.sample(v)).collect()
    }
}

pub fn estimate_shape_operator(mesh: &TriMesh, vertex: usize) -> Result<ShapeOperatorSample> {
    if vertex >= mesh.vertices.len() {
        return Err(GeomError::domain(format!("no vertex {vertex}")));
    }
    ShapeEstimator::new(mesh).sample(vertex)
}

/// Classifies each connected component, ordered by smallest vertex index.
pub fn classify_surface(mesh: &TriMesh) -> Result<Vec<UmbilicVerdict>> {
    match mesh.check_closed_oriented() {
        Ok(()) | Err(GeomError::OpenMesh { .. }) => {}
        Err(e) => return Err(e),
    }
    let est = ShapeEstimator::new(mesh);
    mesh.components()
        .iter()
        .map(|members| classify_component(&est, members))
        .collect()
}

fn classify_component(est: &ShapeEstimator<'_>, members: &[usize]) -> Result<UmbilicVerdict> {
    // Corners of open patches can have too few neighbours; they are skipped
    // as long as the rest of the component is estimable.
    let mut samples = Vec::with_capacity(members.len());
    for r in members.par_iter().map(|&v| est.sample(v)).collect::<Vec<_>>() {
        match r {
            Ok(s) => samples.push(s),
            Err(GeomError::RankDeficient { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if samples.len() * 2 < members.len() {
        return Err(GeomError::RankDeficient { vertex: members[0] });
    }
    let mut lo = Point::repeat(f64::INFINITY);
    let mut hi = Point::repeat(f64::NEG_INFINITY);
    for &v in members {
        lo = lo.inf(&est.mesh.vertices[v]);
        hi = hi.sup(&est.mesh.vertices[v]);
    }
    let extent = (hi - lo).norm();
    let kappas: Vec<f64> = samples.iter().map(|s| s.mean_curvature).collect();
    let mean_abs = kappas.iter().map(|k| k.abs()).sum::<f64>() / kappas.len() as f64;
    let scale = mean_abs.max(1.0 / extent);
    let max_deviation = samples.iter().map(|s| s.umbilic_deviation).fold(0.0, f64::max);
    let kmin = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let kmax = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kappa_spread = kmax - kmin;
    let umbilic = max_deviation <= UMBILIC_TOL * scale && kappa_spread <= UMBILIC_TOL * scale;

    let mut verdict = UmbilicVerdict {
        classification: Classification::Neither,
        vertex_count: members.len(),
        skipped_vertices: members.len() - samples.len(),
        max_deviation,
        kappa_spread,
        fit_residual: 0.0,
        curvature_scale: scale,
    };
    if !umbilic {
        return Ok(verdict);
    }
    let max_abs = kmin.abs().max(kmax.abs());
    if max_abs <= UMBILIC_TOL * scale {
        verdict.classification = Classification::Plane;
        return Ok(verdict);
    }
    let centers: Vec<Point> = samples
        .iter()
        .map(|s| Point::from(s.x) - Point::from(s.normal) / s.mean_curvature)
        .collect();
    let center = centers.iter().sum::<Point>() / centers.len() as f64;
    let dists: Vec<f64> = samples.iter().map(|s| (Point::from(s.x) - center).norm()).collect();
    let radius = dists.iter().sum::<f64>() / dists.len() as f64;
    let residual = dists.iter().map(|d| (d - radius).abs()).fold(0.0, f64::max);
    verdict.fit_residual = residual;
    if residual <= SPHERE_FIT_TOL * radius {
        verdict.classification = Classification::Sphere {
            center: [center.x, center.y, center.z],
            radius,
        };
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;
    use nalgebra::Vector3;

    #[test]
    fn unit_sphere_operator_is_identity() {
        let m = generate::icosphere(5);
        let s = estimate_shape_operator(&m, 17).unwrap();
        assert!(s.umbilic_deviation < 1e-3);
        assert!((s.mean_curvature - 1.0).abs() < 1e-3);
    }

    #[test]
    fn flat_patch_is_a_plane() {
        let m = generate::flat_patch(12, 1.0);
        let s = estimate_shape_operator(&m, 6 * 13 + 6).unwrap();
        assert!(s.operator.iter().flatten().all(|v| v.abs() < 1e-12));
        let v = classify_surface(&m).unwrap();
        assert_eq!(v[0].classification, Classification::Plane);
    }

    #[test]
    fn cylinder_is_not_umbilic() {
        let m = generate::cylinder_patch(1.0, 24, 12, 0.6, 0.6);
        let centre = 6 * 25 + 12;
        let s = estimate_shape_operator(&m, centre).unwrap();
        let [k1, k2] = s.principal_curvatures();
        assert!(k1.abs() < 1e-3 && (k2 - 1.0).abs() < 1e-2, "{k1} {k2}");
        assert!((s.umbilic_deviation - 0.5f64.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn offset_sphere_is_found() {
        let m = generate::sphere(Vector3::new(1.0, 0.0, 0.0), 2.0, 4);
        let v = classify_surface(&m).unwrap();
        match v[0].classification {
            Classification::Sphere { center, radius } => {
                assert!((Point::from(center) - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-3);
                assert!((radius - 2.0).abs() < 1e-3);
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sparse_neighbourhood_is_rank_deficient() {
        let m = TriMesh::new(
            vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
            vec![[0, 1, 2]],
        );
        assert!(matches!(
            estimate_shape_operator(&m, 0),
            Err(GeomError::RankDeficient { vertex: 0 })
        ));
    }

    #[test]
    fn inconsistent_orientation_is_an_error() {
        let mut m = generate::icosphere(1);
        m.triangles[0].swap(1, 2);
        assert!(matches!(classify_surface(&m), Err(GeomError::Orientation(_))));
    }
}
