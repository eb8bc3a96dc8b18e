//! Level sets `{δ = r}` of a distance field by marching simplices over the
//! same Kuhn split used for volumes. Crossing points are shared through
//! their grid edge, so neighbouring cells produce a welded mesh.

use std::collections::HashMap;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use super::field::DistanceField;
use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};
use crate::mesh::{BoundaryMesh, Polyline, TriMesh};
use crate::umbilic::ShapeEstimator;

#[derive(Clone, Debug)]
pub struct OffsetSurface {
    pub r: f64,
    /// Carries the unit normals as explicit vertex normals.
    pub mesh: BoundaryMesh,
    pub normals: Vec<Point>,
    /// Principal curvature estimates per vertex, ascending; `None` where the
    /// neighbourhood was too sparse to fit.
    pub curvatures: Vec<Option<Vec<f64>>>,
}

impl OffsetSurface {
    pub fn vertices(&self) -> &[Point] {
        match &self.mesh {
            BoundaryMesh::Curve(p) => &p.vertices,
            BoundaryMesh::Surface(m) => &m.vertices,
        }
    }
}

struct Welder<'a> {
    field: &'a DistanceField,
    r: f64,
    index: HashMap<(usize, usize), usize>,
    points: Vec<Point>,
}

impl Welder<'_> {
    fn crossing(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let (ga, gb) = (self.field.values[key.0] - self.r, self.field.values[key.1] - self.r);
        let t = ga / (ga - gb);
        let (pa, pb) = (self.field.node_of_index(key.0), self.field.node_of_index(key.1));
        self.points.push(pa + (pb - pa) * t);
        self.index.insert(key, self.points.len() - 1);
        self.points.len() - 1
    }
}

pub fn extract_level_set(field: &DistanceField, r: f64) -> Result<OffsetSurface> {
    if !(r >= 2.0 * field.step) {
        return Err(GeomError::domain(format!(
            "level {r} is below two grid steps ({})",
            2.0 * field.step
        )));
    }
    let margin = field.margin();
    if r >= margin {
        return Err(GeomError::OpenSurface(format!("level {r} reaches the grid margin {margin}")));
    }
    // A node exactly on the level would split into coincident crossings;
    // move the level off the nodes by a negligible amount instead.
    let mut level = r;
    let nudge = 1e-6 * field.step;
    while field.values.iter().any(|&v| (v - level).abs() < 1e-3 * nudge) {
        level -= nudge;
    }
    let r_requested = r;
    let r = level;
    let mut welder = Welder {
        field,
        r,
        index: HashMap::new(),
        points: Vec::new(),
    };
    let [nx, ny, nz] = field.dims;
    let cz = if field.dim == Dim::Three { nz - 1 } else { 1 };
    let mut cells = Vec::new();
    for k in 0..cz {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                cells.push((i, j, k));
            }
        }
    }
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut segments: Vec<[usize; 2]> = Vec::new();
    for (i, j, k) in cells {
        for s in field.cell_simplices(i, j, k) {
            let inside: Vec<usize> = s.iter().copied().filter(|&n| field.values[n] <= r).collect();
            let outside: Vec<usize> = s.iter().copied().filter(|&n| field.values[n] > r).collect();
            if inside.is_empty() || outside.is_empty() {
                continue;
            }
            let up = linear_gradient(field, &s);
            match field.dim {
                Dim::Two => {
                    let pts: Vec<usize> = inside
                        .iter()
                        .flat_map(|&a| outside.iter().map(move |&b| (a, b)))
                        .map(|(a, b)| welder.crossing(a, b))
                        .collect();
                    let (a, b) = (pts[0], pts[1]);
                    let d = welder.points[b] - welder.points[a];
                    // Outward normal of [a, b] is (d.y, −d.x).
                    if Vector3::new(d.y, -d.x, 0.0).dot(&up) >= 0.0 {
                        segments.push([a, b]);
                    } else {
                        segments.push([b, a]);
                    }
                }
                Dim::Three => {
                    let polys: Vec<[usize; 3]> = match (inside.len(), outside.len()) {
                        (1, 3) | (3, 1) => {
                            let (lone, rest) = if inside.len() == 1 { (inside[0], &outside) } else { (outside[0], &inside) };
                            vec![[
                                welder.crossing(lone, rest[0]),
                                welder.crossing(lone, rest[1]),
                                welder.crossing(lone, rest[2]),
                            ]]
                        }
                        _ => {
                            let (a, b) = (inside[0], inside[1]);
                            let (c, d) = (outside[0], outside[1]);
                            let q = [
                                welder.crossing(a, c),
                                welder.crossing(a, d),
                                welder.crossing(b, d),
                                welder.crossing(b, c),
                            ];
                            vec![[q[0], q[1], q[2]], [q[0], q[2], q[3]]]
                        }
                    };
                    for mut t in polys {
                        let p = &welder.points;
                        let n = (p[t[1]] - p[t[0]]).cross(&(p[t[2]] - p[t[0]]));
                        if n.dot(&up) < 0.0 {
                            t.swap(1, 2);
                        }
                        triangles.push(t);
                    }
                }
            }
        }
    }
    let points = welder.points;
    let normals: Vec<Point> = points.iter().map(|x| field.normal_at(x)).collect();
    let (mesh, curvatures) = match field.dim {
        Dim::Two => {
            let line = Polyline {
                vertices: points,
                segments,
                normals: Some(normals.clone()),
            };
            let k = curve_curvatures(&line, &normals);
            (BoundaryMesh::Curve(line), k)
        }
        Dim::Three => {
            let mesh = TriMesh::new(points, triangles).with_normals(normals.clone());
            let est = ShapeEstimator::new(&mesh);
            let k = (0..mesh.vertices.len())
                .map(|v| est.sample(v).ok().map(|s| s.principal_curvatures().to_vec()))
                .collect();
            (BoundaryMesh::Surface(mesh), k)
        }
    };
    mesh.check_closed_oriented()
        .map_err(|e| GeomError::OpenSurface(format!("extracted level set is not closed: {e}")))?;
    Ok(OffsetSurface {
        r: r_requested,
        mesh,
        normals,
        curvatures,
    })
}

/// Gradient of the linear interpolant of the field on simplex `s`.
fn linear_gradient(field: &DistanceField, s: &[usize]) -> Point {
    let p0 = field.node_of_index(s[0]);
    let g0 = field.values[s[0]];
    let e = |i: usize| field.node_of_index(s[i]) - p0;
    let dg = |i: usize| field.values[s[i]] - g0;
    match field.dim {
        Dim::Two => {
            let m = Matrix2::new(e(1).x, e(1).y, e(2).x, e(2).y);
            let g = m.lu().solve(&Vector2::new(dg(1), dg(2))).unwrap_or_else(Vector2::zeros);
            Vector3::new(g.x, g.y, 0.0)
        }
        Dim::Three => {
            let m = Matrix3::from_rows(&[e(1).transpose(), e(2).transpose(), e(3).transpose()]);
            m.lu().solve(&Vector3::new(dg(1), dg(2), dg(3))).unwrap_or_else(Vector3::zeros)
        }
    }
}

/// Curvature of a closed curve at each vertex from the turn of the normal
/// between its two neighbours.
pub(crate) fn curve_curvatures(line: &Polyline, normals: &[Point]) -> Vec<Option<Vec<f64>>> {
    let m = line.vertices.len();
    let mut next = vec![usize::MAX; m];
    let mut prev = vec![usize::MAX; m];
    for &[a, b] in &line.segments {
        next[a] = b;
        prev[b] = a;
    }
    (0..m)
        .map(|v| {
            let (p, q) = (prev[v], next[v]);
            if p == usize::MAX || q == usize::MAX {
                return None;
            }
            let chord = line.vertices[q] - line.vertices[p];
            let len = chord.norm();
            if len == 0.0 {
                return None;
            }
            Some(vec![(normals[q] - normals[p]).dot(&chord) / (len * len)])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;
    use crate::tube::field::build_distance_field;
    use crate::tube::oracle::BBox;
    use std::f64::consts::PI;

    #[test]
    fn ball_offset_is_a_sphere() {
        let h = 0.05;
        let f = build_distance_field(&Body::unit_ball(Dim::Three), BBox::new(Point::repeat(-1.8), Point::repeat(1.8)), h)
            .unwrap();
        let s = extract_level_set(&f, 0.5).unwrap();
        for x in s.vertices() {
            assert!((x.norm() - 1.5).abs() < h);
        }
        for n in &s.normals {
            assert!((n.norm() - 1.0).abs() < 1e-12);
        }
        let BoundaryMesh::Surface(m) = &s.mesh else { panic!() };
        assert_eq!(m.euler_characteristics(), vec![2]);
        assert!((m.signed_volume() - 4.0 * PI / 3.0 * 1.5f64.powi(3)).abs() < 0.01 * 14.0);
    }

    #[test]
    fn circle_offset() {
        let f = build_distance_field(&Body::unit_ball(Dim::Two), BBox::new(Point::repeat(-1.8), Point::repeat(1.8)), 0.02)
            .unwrap();
        let s = extract_level_set(&f, 0.5).unwrap();
        let BoundaryMesh::Curve(line) = &s.mesh else { panic!() };
        assert_eq!(line.loop_count(), 1);
        assert!((line.length() - 3.0 * PI).abs() < 1e-2);
        assert!(line.signed_area() > 0.0);
        for k in s.curvatures.iter().flatten() {
            assert!((k[0] - 1.0 / 1.5).abs() < 1e-2, "{k:?}");
        }
    }

    #[test]
    fn rounded_cube_regions() {
        let r = 0.3;
        let f = build_distance_field(&Body::unit_cube(), BBox::new(Point::repeat(-0.5), Point::repeat(1.5)), 0.025).unwrap();
        let s = extract_level_set(&f, r).unwrap();
        let BoundaryMesh::Surface(m) = &s.mesh else { panic!() };
        assert_eq!(m.euler_characteristics(), vec![2]);
        let mut counts = [0usize; 3];
        let tol = 0.15 / r;
        for k in s.curvatures.iter().flatten() {
            for (c, want) in [[0.0, 0.0], [0.0, 1.0 / r], [1.0 / r, 1.0 / r]].iter().enumerate() {
                if (k[0] - want[0]).abs() < tol && (k[1] - want[1]).abs() < tol {
                    counts[c] += 1;
                }
            }
        }
        assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
    }

    #[test]
    fn too_close_or_too_far() {
        let f = build_distance_field(&Body::unit_cube(), BBox::new(Point::repeat(-0.3), Point::repeat(1.3)), 0.05).unwrap();
        assert!(matches!(extract_level_set(&f, 0.05), Err(GeomError::Domain(_))));
        assert!(matches!(extract_level_set(&f, 0.31), Err(GeomError::OpenSurface(_))));
    }
}
