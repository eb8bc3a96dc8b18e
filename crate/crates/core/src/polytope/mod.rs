//! Face lattices of convex polytopes in the plane and in space, and the
//! spherical measures of their normal cones.

pub mod measures;

use std::collections::BTreeSet;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, BodyKind};
use crate::error::{GeomError, Result};
use crate::geometry::{angle_between, spherical_triangle_area, Dim, Point};
use crate::mesh::{BoundaryMesh, Polyline, TriMesh};

pub use measures::{
    all_measures, cap_body_measures, curvature_measure_total, seam_angle, measures_csv, singular_seam_mass,
    steiner_coefficients_from_measures, CurvatureMeasureReport, FaceContribution, SteinerPolynomial,
};

/// Generators closer than this (in angle) make a cone degenerate.
pub const CONE_DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub dim: usize,
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// Orthonormal basis of the direction space of the affine hull.
    pub basis: Vec<[f64; 3]>,
    /// Faces of dimension `dim + 1` containing this one.
    pub parents: Vec<usize>,
    /// Faces of dimension `dim − 1` contained in this one.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub dim: Dim,
    pub points: Vec<Point>,
    pub faces: Vec<Face>,
    /// Outward unit normal of each facet, keyed by face id.
    facet_normals: Vec<(usize, Point)>,
    /// Facet vertex cycles, counter-clockwise seen from outside.
    facet_cycles: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalConeRecord {
    pub face: usize,
    pub face_dim: usize,
    pub generators: Vec<[f64; 3]>,
    /// `H^{n−m}` of the unit normals at a relative-interior point; facets
    /// carry a single atom of mass 1.
    pub spherical_measure: f64,
}

fn scale_of(points: &[Point]) -> f64 {
    let c = points.iter().sum::<Point>() / points.len() as f64;
    points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
}

/// Rank of a set of unit vectors.
fn span_rank(vectors: &[Point]) -> usize {
    let mut m = nalgebra::Matrix3::zeros();
    for v in vectors {
        m += v * v.transpose();
    }
    m.symmetric_eigenvalues().iter().filter(|&&e| e > 1e-9).count()
}

struct Supporting {
    normal: Point,
    members: BTreeSet<usize>,
}

fn supporting_planes(points: &[Point], dim: Dim, tol: f64) -> Vec<Supporting> {
    let m = points.len();
    let mut found: Vec<Supporting> = Vec::new();
    let mut consider = |normal: Point, anchor: usize| {
        let offset = normal.dot(&points[anchor]);
        let mut sign = 0.0;
        let mut members = BTreeSet::new();
        for (q, p) in points.iter().enumerate() {
            let s = normal.dot(p) - offset;
            if s.abs() <= tol {
                members.insert(q);
            } else if sign == 0.0 {
                sign = s.signum();
            } else if s.signum() != sign {
                return;
            }
        }
        let normal = if sign > 0.0 { -normal } else { normal };
        if !found.iter().any(|f| f.members == members) {
            found.push(Supporting { normal, members });
        }
    };
    match dim {
        Dim::Two => {
            for i in 0..m {
                for j in i + 1..m {
                    let d = points[j] - points[i];
                    if d.norm() <= tol {
                        continue;
                    }
                    consider(Vector3::new(d.y, -d.x, 0.0).normalize(), i);
                }
            }
        }
        Dim::Three => {
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        let (a, b) = (points[j] - points[i], points[k] - points[i]);
                        let c = a.cross(&b);
                        if c.norm() <= 1e-9 * a.norm() * b.norm() {
                            continue;
                        }
                        consider(c.normalize(), i);
                    }
                }
            }
        }
    }
    found
}

impl FaceLattice {
    pub fn build(body: &Body) -> Result<Self> {
        let BodyKind::Polytope { vertices } = body.kind() else {
            return Err(GeomError::Unsupported(format!("{:?} is not a polytope", body.kind())));
        };
        Self::from_points(body.dim(), vertices.clone())
    }

    pub fn from_points(dim: Dim, points: Vec<Point>) -> Result<Self> {
        let n = dim.n();
        let tol = 1e-9 * scale_of(&points).max(f64::MIN_POSITIVE);
        let facets = supporting_planes(&points, dim, tol);
        if facets.len() < dim.ambient() + 1 {
            return Err(GeomError::Degenerate("points do not bound a full-dimensional polytope".into()));
        }
        // Every input point must be an extreme point: the normals of the
        // facets through it must span the ambient space.
        for (idx, _) in points.iter().enumerate() {
            let normals: Vec<Point> = facets
                .iter()
                .filter(|f| f.members.contains(&idx))
                .map(|f| f.normal)
                .collect();
            if span_rank(&normals) < dim.ambient() {
                return Err(GeomError::NotConvexPosition { index: idx });
            }
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
        let push = |faces: &mut Vec<Face>, by_dim: &mut Vec<Vec<usize>>, d: usize, verts: Vec<usize>| {
            let basis = affine_basis(&points, &verts);
            faces.push(Face {
                dim: d,
                vertices: verts,
                basis: basis.iter().map(|b| [b.x, b.y, b.z]).collect(),
                parents: Vec::new(),
                children: Vec::new(),
            });
            by_dim[d].push(faces.len() - 1);
        };
        for i in 0..points.len() {
            push(&mut faces, &mut by_dim, 0, vec![i]);
        }
        if dim == Dim::Three {
            let mut edges: Vec<Vec<usize>> = Vec::new();
            for a in 0..facets.len() {
                for b in a + 1..facets.len() {
                    let common: Vec<usize> = facets[a].members.intersection(&facets[b].members).copied().collect();
                    if common.len() >= 2 && !edges.contains(&common) {
                        edges.push(common);
                    }
                }
            }
            for e in edges {
                push(&mut faces, &mut by_dim, 1, e);
            }
        }
        let mut facet_normals = Vec::new();
        for f in &facets {
            push(&mut faces, &mut by_dim, n, f.members.iter().copied().collect());
            facet_normals.push((faces.len() - 1, f.normal));
        }
        push(&mut faces, &mut by_dim, n + 1, (0..points.len()).collect());

        for d in 0..=n {
            for &child in &by_dim[d] {
                for &parent in &by_dim[d + 1] {
                    let cv = &faces[child].vertices;
                    let pv = &faces[parent].vertices;
                    if cv.iter().all(|v| pv.binary_search(v).is_ok()) {
                        faces[child].parents.push(parent);
                        faces[parent].children.push(child);
                    }
                }
            }
        }

        let facet_cycles = facet_normals
            .iter()
            .map(|&(id, normal)| (id, cycle_facet(&points, &faces[id].vertices, &normal, dim)))
            .collect();
        Ok(FaceLattice {
            dim,
            points,
            faces,
            facet_normals,
            facet_cycles,
        })
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    /// Face ids of dimension `d`.
    pub fn faces_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].dim == d).collect()
    }

    /// Face counts by dimension `0..=n`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.n()).map(|d| self.faces_of_dim(d).len()).collect()
    }

    pub fn facet_normal(&self, face: usize) -> Option<Point> {
        self.facet_normals.iter().find(|(id, _)| *id == face).map(|(_, n)| *n)
    }

    /// Outward normals of the facets containing `face`.
    pub fn incident_facet_normals(&self, face: usize) -> Vec<(usize, Point)> {
        let verts = &self.faces[face].vertices;
        self.facet_normals
            .iter()
            .filter(|(id, _)| verts.iter().all(|v| self.faces[*id].vertices.binary_search(v).is_ok()))
            .copied()
            .collect()
    }

    /// `H^m` of an `m`-face: 1 for vertices, length for edges, area for
    /// polygons.
    pub fn face_measure(&self, face: usize) -> f64 {
        let f = &self.faces[face];
        match f.dim {
            0 => 1.0,
            1 => {
                let (a, b) = extreme_pair(&self.points, &f.vertices);
                (self.points[b] - self.points[a]).norm()
            }
            2 if self.dim == Dim::Three => {
                let cycle = &self.facet_cycles.iter().find(|(id, _)| *id == face).expect("facet").1;
                let p0 = self.points[cycle[0]];
                let mut area = Vector3::zeros();
                for w in cycle.windows(2).skip(1) {
                    area += (self.points[w[0]] - p0).cross(&(self.points[w[1]] - p0));
                }
                0.5 * area.norm()
            }
            _ => self.volume(),
        }
    }

    pub fn boundary_mesh(&self) -> BoundaryMesh {
        match self.dim {
            Dim::Two => {
                let (_, cycle) = &self.facet_cycles_2d();
                BoundaryMesh::Curve(Polyline::closed(cycle.iter().map(|&i| self.points[i]).collect()))
            }
            Dim::Three => {
                let mut tris = Vec::new();
                for (_, cycle) in &self.facet_cycles {
                    for w in cycle.windows(2).skip(1) {
                        tris.push([cycle[0], w[0], w[1]]);
                    }
                }
                BoundaryMesh::Surface(TriMesh::new(self.points.clone(), tris))
            }
        }
    }

    /// Boundary polygon of a planar polytope, counter-clockwise.
    fn facet_cycles_2d(&self) -> (usize, Vec<usize>) {
        let centre = self.points.iter().sum::<Point>() / self.points.len() as f64;
        let mut order: Vec<usize> = (0..self.points.len()).collect();
        order.sort_by(|&a, &b| {
            let pa = self.points[a] - centre;
            let pb = self.points[b] - centre;
            pa.y.atan2(pa.x).total_cmp(&pb.y.atan2(pb.x))
        });
        (self.faces.len() - 1, order)
    }

    pub fn volume(&self) -> f64 {
        self.boundary_mesh().signed_volume()
    }

    pub fn normal_cone_measure(&self, face: usize) -> Result<NormalConeRecord> {
        let f = self.faces.get(face).ok_or_else(|| GeomError::domain(format!("no face {face}")))?;
        let n = self.n();
        if f.dim > n {
            return Err(GeomError::domain("the body itself has no normal cone"));
        }
        let incident = self.incident_facet_normals(face);
        let mut generators: Vec<Point> = incident.iter().map(|(_, g)| *g).collect();
        let measure = if f.dim == n {
            1.0
        } else if n - f.dim == 1 {
            // Arc between two facet normals.
            if generators.len() != 2 {
                return Err(GeomError::Degenerate(format!(
                    "face {face} lies on {} facets, expected 2",
                    generators.len()
                )));
            }
            let angle = angle_between(&generators[0], &generators[1]);
            if angle < CONE_DEGENERACY_TOL {
                return Err(GeomError::Degenerate(format!("normal cone of face {face} is degenerate")));
            }
            angle
        } else {
            // Vertex cone in space: spherical polygon on the facet normals.
            let axis = generators.iter().sum::<Point>().normalize();
            let (e1, e2) = crate::geometry::orthonormal_pair(&axis);
            generators.sort_by(|a, b| a.dot(&e2).atan2(a.dot(&e1)).total_cmp(&b.dot(&e2).atan2(b.dot(&e1))));
            let k = generators.len();
            for i in 0..k {
                if angle_between(&generators[i], &generators[(i + 1) % k]) < CONE_DEGENERACY_TOL {
                    return Err(GeomError::Degenerate(format!("normal cone of face {face} is degenerate")));
                }
            }
            (1..k - 1)
                .map(|i| spherical_triangle_area(&generators[0], &generators[i], &generators[i + 1]))
                .sum()
        };
        Ok(NormalConeRecord {
            face,
            face_dim: f.dim,
            generators: generators.iter().map(|g| [g.x, g.y, g.z]).collect(),
            spherical_measure: measure,
        })
    }

    /// Monte Carlo estimate of each vertex's normal-cone measure: the share
    /// of random directions maximised at that vertex, times `H^n(S^n)`.
    pub fn vertex_cones_monte_carlo(&self, samples: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = vec![0usize; self.points.len()];
        let mut drawn = 0;
        while drawn < samples {
            let mut u = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            u = self.dim.project(u);
            let r = u.norm();
            if !(1e-6..=1.0).contains(&r) {
                continue;
            }
            drawn += 1;
            let best = (0..self.points.len())
                .max_by(|&a, &b| self.points[a].dot(&u).total_cmp(&self.points[b].dot(&u)))
                .expect("nonempty");
            hits[best] += 1;
        }
        hits.iter()
            .map(|&h| h as f64 / samples as f64 * self.dim.sphere_measure())
            .collect()
    }
}

fn extreme_pair(points: &[Point], verts: &[usize]) -> (usize, usize) {
    let mut best = (verts[0], verts[0], -1.0);
    for &a in verts {
        for &b in verts {
            let d = (points[a] - points[b]).norm();
            if d > best.2 {
                best = (a, b, d);
            }
        }
    }
    (best.0, best.1)
}

fn affine_basis(points: &[Point], verts: &[usize]) -> Vec<Point> {
    let p0 = points[verts[0]];
    let mut basis: Vec<Point> = Vec::new();
    for &v in &verts[1..] {
        let mut d = points[v] - p0;
        for b in &basis {
            d -= b * b.dot(&d);
        }
        if d.norm() > 1e-9 * (points[v] - p0).norm().max(1e-300) && d.norm() > 0.0 {
            basis.push(d.normalize());
        }
        if basis.len() == 3 {
            break;
        }
    }
    basis
}

/// Vertex cycle of a spatial facet, counter-clockwise about its outward
/// normal. For planar polytopes the "facet" is an edge and is returned as is.
fn cycle_facet(points: &[Point], verts: &[usize], normal: &Point, dim: Dim) -> Vec<usize> {
    if dim == Dim::Two {
        let mut v = verts.to_vec();
        let d = points[v[1]] - points[v[0]];
        if Vector3::new(d.y, -d.x, 0.0).dot(normal) < 0.0 {
            v.swap(0, 1);
        }
        return v;
    }
    let centre = verts.iter().map(|&i| points[i]).sum::<Point>() / verts.len() as f64;
    let (e1, e2) = crate::geometry::orthonormal_pair(normal);
    let mut v = verts.to_vec();
    v.sort_by(|&a, &b| {
        let pa = points[a] - centre;
        let pb = points[b] - centre;
        pa.dot(&e2).atan2(pa.dot(&e1)).total_cmp(&pb.dot(&e2).atan2(pb.dot(&e1)))
    });
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cube_square_tetrahedron_counts() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        assert_eq!(cube.f_vector(), vec![8, 12, 6]);
        assert_eq!(cube.faces_of_dim(3).len(), 1);
        let sq = FaceLattice::build(&Body::unit_square()).unwrap();
        assert_eq!(sq.f_vector(), vec![4, 4]);
        let tet = FaceLattice::build(&Body::regular_tetrahedron()).unwrap();
        assert_eq!(tet.f_vector(), vec![4, 6, 4]);
    }

    #[test]
    fn incidences_are_consistent() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        for e in cube.faces_of_dim(1) {
            assert_eq!(cube.faces[e].children.len(), 2);
            assert_eq!(cube.faces[e].parents.len(), 2);
        }
        for f in cube.faces_of_dim(2) {
            assert_eq!(cube.faces[f].children.len(), 4);
            assert_eq!(cube.face_measure(f), 1.0);
        }
    }

    #[test]
    fn cube_cones() {
        let cube = FaceLattice::build(&Body::unit_cube()).unwrap();
        for v in cube.faces_of_dim(0) {
            let r = cube.normal_cone_measure(v).unwrap();
            assert!((r.spherical_measure - PI / 2.0).abs() < 1e-12);
        }
        for e in cube.faces_of_dim(1) {
            assert!((cube.normal_cone_measure(e).unwrap().spherical_measure - PI / 2.0).abs() < 1e-12);
        }
        let mc = cube.vertex_cones_monte_carlo(200_000, 11);
        for m in mc {
            assert!((m - PI / 2.0).abs() < 0.02 * PI / 2.0);
        }
        let sq = FaceLattice::build(&Body::unit_square()).unwrap();
        for v in sq.faces_of_dim(0) {
            assert!((sq.normal_cone_measure(v).unwrap().spherical_measure - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_point_is_rejected() {
        let mut pts: Vec<Point> = match Body::unit_cube().kind() {
            BodyKind::Polytope { vertices } => vertices.clone(),
            _ => unreachable!(),
        };
        pts.push(Vector3::new(0.5, 0.5, 0.5));
        assert!(matches!(
            FaceLattice::from_points(Dim::Three, pts.clone()),
            Err(GeomError::NotConvexPosition { index: 8 })
        ));
        // A point in the middle of an edge is not extreme either.
        pts[8] = Vector3::new(0.5, 0.0, 0.0);
        assert!(FaceLattice::from_points(Dim::Three, pts).is_err());
    }

    #[test]
    fn boundary_meshes_are_closed_and_outward() {
        for body in [Body::unit_cube(), Body::regular_tetrahedron(), Body::unit_square()] {
            let lattice = FaceLattice::build(&body).unwrap();
            let mesh = lattice.boundary_mesh();
            mesh.check_closed_oriented().unwrap();
            assert!(mesh.signed_volume() > 0.0);
        }
        let tet = FaceLattice::build(&Body::regular_tetrahedron()).unwrap();
        assert!((tet.volume() - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-14);
    }
}
