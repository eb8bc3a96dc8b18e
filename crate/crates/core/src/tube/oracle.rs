//! Exact distance from a point to a body, with the nearest point.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::bodies::{Body, BodyKind, SampledSet};
use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};
use crate::mesh::{BoundaryMesh, TriMesh};
use crate::polytope::FaceLattice;

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub lo: Point,
    pub hi: Point,
}

impl BBox {
    pub fn new(lo: Point, hi: Point) -> Self {
        BBox { lo, hi }
    }

    fn empty() -> Self {
        BBox::new(Point::repeat(f64::INFINITY), Point::repeat(f64::NEG_INFINITY))
    }

    fn include(&mut self, p: &Point) {
        self.lo = self.lo.inf(p);
        self.hi = self.hi.sup(p);
    }

    fn union(mut self, other: &BBox) -> Self {
        self.include(&other.lo);
        self.include(&other.hi);
        self
    }

    /// Grown by `margin` along every axis of `dim` (z stays flat in the plane).
    pub fn padded(&self, margin: f64, dim: Dim) -> Self {
        let pad = dim.project(Point::repeat(margin));
        BBox::new(self.lo - pad, self.hi + pad)
    }

    pub fn contains(&self, other: &BBox) -> bool {
        (0..3).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Ball { center: Point, radius: f64 },
    /// Convex polytope: outward facet planes `n·x ≤ d` plus boundary pieces.
    Polytope { planes: Vec<(Point, f64)>, boundary: Boundary },
    /// Half of the cap body: ball of radius 1 about `center` cut by
    /// `sign · x_up ≥ 0`.
    Cap { center: Point, sign: f64, seam_radius: f64 },
    Points(Vec<Point>),
    Boxes(Vec<(Point, Point)>),
    Solid(TriMesh),
    Union(Vec<DistanceOracle>),
}

#[derive(Clone, Debug)]
enum Boundary {
    Segments(Vec<(Point, Point)>),
    Triangles(Vec<[Point; 3]>),
}

/// Exact point-to-set distance for the supported body kinds.
#[derive(Clone, Debug)]
pub struct DistanceOracle {
    dim: Dim,
    shape: Arc<Shape>,
    bbox: BBox,
}

impl DistanceOracle {
    pub fn from_body(body: &Body) -> Result<Self> {
        let dim = body.dim();
        let up = dim.ambient() - 1;
        let shape = match body.kind() {
            BodyKind::Ball { center, radius } => Shape::Ball {
                center: *center,
                radius: *radius,
            },
            BodyKind::Polytope { .. } => {
                let lattice = FaceLattice::build(body)?;
                polytope_shape(&lattice)
            }
            BodyKind::CapBody { epsilon } => {
                let eps = *epsilon;
                let seam_radius = (1.0 - eps * eps).sqrt();
                let mut halves = Vec::new();
                for sign in [1.0, -1.0] {
                    let mut center = Vector3::zeros();
                    center[up] = -sign * eps;
                    let mut bbox = BBox::empty();
                    let mut top = Vector3::zeros();
                    top[up] = sign * (1.0 - eps);
                    bbox.include(&top);
                    bbox.include(&dim.project(Point::repeat(seam_radius)));
                    bbox.include(&dim.project(Point::repeat(-seam_radius)));
                    let mut flat = bbox;
                    flat.lo[up] = flat.lo[up].min(0.0);
                    flat.hi[up] = flat.hi[up].max(0.0);
                    halves.push(DistanceOracle {
                        dim,
                        shape: Arc::new(Shape::Cap {
                            center,
                            sign,
                            seam_radius,
                        }),
                        bbox: flat,
                    });
                }
                Shape::Union(halves)
            }
            BodyKind::SampledSet(SampledSet::Points(p)) => Shape::Points(p.clone()),
            BodyKind::SampledSet(SampledSet::Voxels { cells, size }) => Shape::Boxes(
                cells
                    .iter()
                    .map(|c| {
                        let lo = Vector3::new(c[0] as f64, c[1] as f64, c[2] as f64) * *size;
                        (lo, dim.project(lo + Point::repeat(*size)))
                    })
                    .collect(),
            ),
            BodyKind::SampledSet(SampledSet::Mesh(m)) => Shape::Solid(m.clone()),
            BodyKind::SampledSet(SampledSet::Union(parts)) => {
                Shape::Union(parts.iter().map(DistanceOracle::from_body).collect::<Result<_>>()?)
            }
            other => {
                return Err(GeomError::Unsupported(format!(
                    "no exact distance for {other:?}"
                )))
            }
        };
        let bbox = shape_bbox(&shape, dim);
        Ok(DistanceOracle {
            dim,
            shape: Arc::new(shape),
            bbox,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn distance(&self, x: &Point) -> f64 {
        self.nearest(x).0
    }

    /// `(δ(x), ξ(x))`; inside the set `ξ(x) = x`.
    pub fn nearest(&self, x: &Point) -> (f64, Point) {
        let up = self.dim.ambient() - 1;
        match self.shape.as_ref() {
            Shape::Ball { center, radius } => {
                let d = x - center;
                let r = d.norm();
                if r <= *radius {
                    (0.0, *x)
                } else {
                    (r - radius, center + d * (radius / r))
                }
            }
            Shape::Polytope { planes, boundary } => {
                if planes.iter().all(|(n, d)| n.dot(x) <= *d) {
                    return (0.0, *x);
                }
                boundary.nearest(x)
            }
            Shape::Cap {
                center,
                sign,
                seam_radius,
            } => cap_nearest(x, center, *sign, *seam_radius, up, self.dim),
            Shape::Points(ps) => nearest_of(ps.iter().copied(), x),
            Shape::Boxes(boxes) => nearest_of(
                boxes.iter().map(|(lo, hi)| x.sup(lo).inf(hi)),
                x,
            ),
            Shape::Solid(mesh) => {
                if winding_number(mesh, x) > 0.5 {
                    return (0.0, *x);
                }
                nearest_of(
                    mesh.triangles.iter().map(|t| {
                        closest_on_triangle(x, &mesh.vertices[t[0]], &mesh.vertices[t[1]], &mesh.vertices[t[2]])
                    }),
                    x,
                )
            }
            Shape::Union(parts) => parts
                .iter()
                .map(|p| p.nearest(x))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty union"),
        }
    }
}

fn nearest_of(candidates: impl Iterator<Item = Point>, x: &Point) -> (f64, Point) {
    let mut best = (f64::INFINITY, *x);
    for c in candidates {
        let d = (c - x).norm();
        if d < best.0 {
            best = (d, c);
        }
    }
    best
}

impl Boundary {
    fn nearest(&self, x: &Point) -> (f64, Point) {
        match self {
            Boundary::Segments(s) => nearest_of(s.iter().map(|(a, b)| closest_on_segment(x, a, b)), x),
            Boundary::Triangles(t) => nearest_of(t.iter().map(|[a, b, c]| closest_on_triangle(x, a, b, c)), x),
        }
    }
}

fn polytope_shape(lattice: &FaceLattice) -> Shape {
    let planes = lattice
        .faces_of_dim(lattice.n())
        .into_iter()
        .map(|f| {
            let n = lattice.facet_normal(f).expect("facet normal");
            (n, n.dot(&lattice.points[lattice.faces[f].vertices[0]]))
        })
        .collect();
    let boundary = match lattice.boundary_mesh() {
        BoundaryMesh::Curve(c) => Boundary::Segments(
            c.segments
                .iter()
                .map(|&[a, b]| (c.vertices[a], c.vertices[b]))
                .collect(),
        ),
        BoundaryMesh::Surface(m) => Boundary::Triangles(
            m.triangles
                .iter()
                .map(|t| [m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]])
                .collect(),
        ),
    };
    Shape::Polytope { planes, boundary }
}

fn shape_bbox(shape: &Shape, dim: Dim) -> BBox {
    let mut b = BBox::empty();
    match shape {
        Shape::Ball { center, radius } => {
            let r = dim.project(Point::repeat(*radius));
            b.include(&(center - r));
            b.include(&(center + r));
        }
        Shape::Polytope { boundary, .. } => match boundary {
            Boundary::Segments(s) => s.iter().for_each(|(p, q)| {
                b.include(p);
                b.include(q);
            }),
            Boundary::Triangles(t) => t.iter().flatten().for_each(|p| b.include(p)),
        },
        Shape::Cap { .. } => unreachable!("cap halves carry their own boxes"),
        Shape::Points(ps) => ps.iter().for_each(|p| b.include(p)),
        Shape::Boxes(bs) => bs.iter().for_each(|(lo, hi)| {
            b.include(lo);
            b.include(hi);
        }),
        Shape::Solid(m) => m.vertices.iter().for_each(|p| b.include(p)),
        Shape::Union(parts) => {
            for p in parts {
                b = b.union(&p.bbox);
            }
        }
    }
    b
}

/// Nearest point of `B(center, 1) ∩ {sign · x_up ≥ 0}`.
fn cap_nearest(x: &Point, center: &Point, sign: f64, seam_radius: f64, up: usize, dim: Dim) -> (f64, Point) {
    let d = x - center;
    let r = d.norm();
    let in_ball = r <= 1.0;
    let in_half = sign * x[up] >= 0.0;
    if in_ball && in_half {
        return (0.0, *x);
    }
    // Projection onto the ball, if it lands in the half-space.
    if !in_ball {
        let p = center + d / r;
        if sign * p[up] >= 0.0 {
            return (r - 1.0, p);
        }
    }
    // Projection onto the plane, if it lands in the ball.
    let mut p = *x;
    p[up] = 0.0;
    if (p - center).norm() <= 1.0 {
        return ((x - p).norm(), p);
    }
    // Otherwise the nearest point lies on the seam.
    let radial = dim.project(p);
    let dir = if radial.norm() > 0.0 {
        radial / radial.norm()
    } else {
        let mut e = Vector3::zeros();
        e[0] = 1.0;
        e
    };
    let q = dir * seam_radius;
    ((x - q).norm(), q)
}

pub fn closest_on_segment(x: &Point, a: &Point, b: &Point) -> Point {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((x - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Closest point on a triangle (Ericson, Real-Time Collision Detection 5.1.5).
pub fn closest_on_triangle(p: &Point, a: &Point, b: &Point, c: &Point) -> Point {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Generalised winding number of a closed oriented mesh about `x`.
pub fn winding_number(mesh: &TriMesh, x: &Point) -> f64 {
    let mut total = 0.0;
    for t in &mesh.triangles {
        let a = mesh.vertices[t[0]] - x;
        let b = mesh.vertices[t[1]] - x;
        let c = mesh.vertices[t[2]] - x;
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        total += 2.0 * num.atan2(den);
    }
    total / (4.0 * std::f64::consts::PI)
}
