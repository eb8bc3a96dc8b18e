//! Boundary meshes: oriented triangle surfaces in space and closed polylines
//! in the plane.

pub mod generate;
pub mod io;

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};

/// Oriented triangle mesh. Counter-clockwise triangles seen from outside.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Explicit per-vertex unit normals; used verbatim when present.
    pub normals: Option<Vec<Point>>,
}

/// Closed planar polyline; segment `[a, b]` runs from `a` to `b`
/// counter-clockwise around the enclosed region.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<Point>,
    pub segments: Vec<[usize; 2]>,
    pub normals: Option<Vec<Point>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryMesh {
    Curve(Polyline),
    Surface(TriMesh),
}

impl BoundaryMesh {
    pub fn dim(&self) -> Dim {
        match self {
            BoundaryMesh::Curve(_) => Dim::Two,
            BoundaryMesh::Surface(_) => Dim::Three,
        }
    }

    /// Total `H^n` measure of the boundary.
    pub fn measure(&self) -> f64 {
        match self {
            BoundaryMesh::Curve(p) => p.length(),
            BoundaryMesh::Surface(m) => m.area(),
        }
    }

    pub fn check_closed_oriented(&self) -> Result<()> {
        match self {
            BoundaryMesh::Curve(p) => p.check_closed_oriented(),
            BoundaryMesh::Surface(m) => m.check_closed_oriented(),
        }
    }

    /// Signed enclosed volume from the divergence theorem, without checks.
    pub fn signed_volume(&self) -> f64 {
        match self {
            BoundaryMesh::Curve(p) => p.signed_area(),
            BoundaryMesh::Surface(m) => m.signed_volume(),
        }
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
            normals: None,
        }
    }

    pub fn with_normals(mut self, normals: Vec<Point>) -> Self {
        self.normals = Some(normals);
        self
    }

    /// Area-weighted normal of triangle `t` (length = 2 · area).
    pub fn face_cross(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn face_area(&self, t: usize) -> f64 {
        0.5 * self.face_cross(t).norm()
    }

    pub fn face_centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.face_area(t)).sum()
    }

    /// `(1/3) Σ (centroid · n) · area` over triangles.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.face_centroid(t).dot(&self.face_cross(t)) * 0.5)
            .sum::<f64>()
            / 3.0
    }

    /// Every undirected edge must be used by exactly two triangles, once in
    /// each direction.
    pub fn check_closed_oriented(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for i in 0..3 {
                let e = (tri[i], tri[(i + 1) % 3]);
                *directed.entry(e).or_default() += 1;
            }
        }
        let mut boundary = 0;
        let mut mixed = 0;
        for (&(a, b), &count) in &directed {
            if count > 1 {
                mixed += 1;
            }
            if !directed.contains_key(&(b, a)) {
                boundary += 1;
            }
        }
        if mixed > 0 {
            return Err(GeomError::Orientation(format!(
                "{mixed} directed edge(s) shared by triangles with the same orientation"
            )));
        }
        if boundary > 0 {
            return Err(GeomError::OpenMesh {
                boundary_edges: boundary,
            });
        }
        Ok(())
    }

    pub fn flip(&mut self) {
        for tri in &mut self.triangles {
            tri.swap(1, 2);
        }
        if let Some(normals) = &mut self.normals {
            for n in normals {
                *n = -*n;
            }
        }
    }

    /// Validates closedness and consistent orientation, then flips the whole
    /// mesh when the enclosed volume comes out negative.
    pub fn orient_outward(&mut self) -> Result<()> {
        self.check_closed_oriented()?;
        if self.signed_volume() < 0.0 {
            self.flip();
        }
        Ok(())
    }

    /// Sorted vertex neighbour lists.
    pub fn vertex_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// vertex index. Isolated vertices are ignored.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.vertex_adjacency();
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if label[start] != usize::MAX || adj[start].is_empty() {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            label[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// `V − E + F` of each component, in [`TriMesh::components`] order.
    pub fn euler_characteristics(&self) -> Vec<i64> {
        let comps = self.components();
        let mut comp_of = vec![usize::MAX; self.vertices.len()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                comp_of[v] = c;
            }
        }
        let mut v = vec![0i64; comps.len()];
        let mut e = vec![0i64; comps.len()];
        let mut f = vec![0i64; comps.len()];
        for (c, members) in comps.iter().enumerate() {
            v[c] = members.len() as i64;
        }
        for (a, list) in self.vertex_adjacency().iter().enumerate() {
            for &b in list {
                if a < b {
                    e[comp_of[a]] += 1;
                }
            }
        }
        for tri in &self.triangles {
            f[comp_of[tri[0]]] += 1;
        }
        (0..comps.len()).map(|c| v[c] - e[c] + f[c]).collect()
    }

    /// Area-weighted vertex normals from the faces.
    pub fn face_averaged_normals(&self) -> Vec<Point> {
        let mut normals = vec![Vector3::zeros(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let n = self.face_cross(t);
            for &v in tri {
                normals[v] += n;
            }
        }
        normals
            .into_iter()
            .map(|n| {
                let len = n.norm();
                if len > 0.0 {
                    n / len
                } else {
                    n
                }
            })
            .collect()
    }

    /// The explicit normals if present, else face-averaged ones.
    pub fn vertex_normals(&self) -> Vec<Point> {
        match &self.normals {
            Some(n) => n.clone(),
            None => self.face_averaged_normals(),
        }
    }

    pub fn transformed(&self, f: impl Fn(&Point) -> Point, rotate: impl Fn(&Point) -> Point) -> Self {
        TriMesh {
            vertices: self.vertices.iter().map(&f).collect(),
            triangles: self.triangles.clone(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(&rotate).collect()),
        }
    }

    /// Disjoint union; indices of `other` are shifted.
    pub fn merged(&self, other: &TriMesh) -> Self {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]),
        );
        let normals = match (&self.normals, &other.normals) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        TriMesh {
            vertices,
            triangles,
            normals,
        }
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for (a, list) in self.vertex_adjacency().iter().enumerate() {
            for &b in list {
                if a < b {
                    total += (self.vertices[a] - self.vertices[b]).norm();
                    count += 1;
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }
}

impl Polyline {
    pub fn new(vertices: Vec<Point>, segments: Vec<[usize; 2]>) -> Self {
        Polyline {
            vertices,
            segments,
            normals: None,
        }
    }

    /// Closed polygon through `vertices` in order.
    pub fn closed(vertices: Vec<Point>) -> Self {
        let m = vertices.len();
        let segments = (0..m).map(|i| [i, (i + 1) % m]).collect();
        Polyline::new(vertices, segments)
    }

    pub fn segment_length(&self, s: usize) -> f64 {
        let [a, b] = self.segments[s];
        (self.vertices[b] - self.vertices[a]).norm()
    }

    /// Outward normal of segment `s` scaled by its length.
    pub fn segment_normal(&self, s: usize) -> Point {
        let [a, b] = self.segments[s];
        let d = self.vertices[b] - self.vertices[a];
        Vector3::new(d.y, -d.x, 0.0)
    }

    pub fn length(&self) -> f64 {
        (0..self.segments.len()).map(|s| self.segment_length(s)).sum()
    }

    /// `(1/2) Σ (midpoint · n) · length`.
    pub fn signed_area(&self) -> f64 {
        self.segments
            .iter()
            .enumerate()
            .map(|(s, &[a, b])| {
                let mid = (self.vertices[a] + self.vertices[b]) * 0.5;
                mid.dot(&self.segment_normal(s))
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn check_closed_oriented(&self) -> Result<()> {
        let mut starts = vec![0usize; self.vertices.len()];
        let mut ends = vec![0usize; self.vertices.len()];
        for &[a, b] in &self.segments {
            starts[a] += 1;
            ends[b] += 1;
        }
        let mut boundary = 0;
        for v in 0..self.vertices.len() {
            let (s, e) = (starts[v], ends[v]);
            if s == 0 && e == 0 {
                continue;
            }
            if s > 1 || e > 1 {
                return Err(GeomError::Orientation(format!(
                    "vertex {v} starts {s} and ends {e} segments"
                )));
            }
            if s != e {
                boundary += 1;
            }
        }
        if boundary > 0 {
            return Err(GeomError::OpenMesh {
                boundary_edges: boundary,
            });
        }
        Ok(())
    }

    pub fn flip(&mut self) {
        for seg in &mut self.segments {
            seg.swap(0, 1);
        }
        if let Some(normals) = &mut self.normals {
            for n in normals {
                *n = -*n;
            }
        }
    }

    pub fn orient_outward(&mut self) -> Result<()> {
        self.check_closed_oriented()?;
        if self.signed_area() < 0.0 {
            self.flip();
        }
        Ok(())
    }

    /// Number of closed loops.
    pub fn loop_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &[a, b] in &self.segments {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = self
            .segments
            .iter()
            .map(|&[a, _]| find(&mut parent, a))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_is_closed_with_unit_volume() {
        let cube = generate::box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
        cube.check_closed_oriented().unwrap();
        assert!((cube.signed_volume() - 1.0).abs() < 1e-15);
        assert!((cube.area() - 6.0).abs() < 1e-15);
        assert_eq!(cube.euler_characteristics(), vec![2]);
    }

    #[test]
    fn removing_a_face_opens_the_mesh() {
        let mut cube = generate::box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
        cube.triangles.pop();
        assert!(matches!(
            cube.check_closed_oriented(),
            Err(GeomError::OpenMesh { boundary_edges: 3 })
        ));
    }

    #[test]
    fn mixed_orientation_is_rejected_not_repaired() {
        let mut cube = generate::box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
        cube.triangles[0].swap(1, 2);
        assert!(matches!(cube.orient_outward(), Err(GeomError::Orientation(_))));
    }

    #[test]
    fn global_flip_is_repaired() {
        let mut cube = generate::box_mesh(Vector3::zeros(), Vector3::repeat(1.0));
        cube.flip();
        assert!(cube.signed_volume() < 0.0);
        cube.orient_outward().unwrap();
        assert!((cube.signed_volume() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_spheres_are_two_components() {
        let a = generate::sphere(Vector3::zeros(), 1.0, 2);
        let b = generate::sphere(Vector3::new(4.0, 0.0, 0.0), 1.0, 2);
        let both = a.merged(&b);
        assert_eq!(both.components().len(), 2);
        assert_eq!(both.euler_characteristics(), vec![2, 2]);
    }

    #[test]
    fn square_polyline() {
        let sq = Polyline::closed(vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ]);
        sq.check_closed_oriented().unwrap();
        assert!((sq.signed_area() - 1.0).abs() < 1e-15);
        assert_eq!(sq.length(), 4.0);
        assert_eq!(sq.loop_count(), 1);
    }
}
