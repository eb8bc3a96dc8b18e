//! Mesh generators for the reference fixtures.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{Polyline, TriMesh};
use crate::geometry::Point;

/// Unit icosphere after `subdivisions` rounds of 4-to-1 splitting. Vertex
/// normals equal the positions.
pub fn icosphere(subdivisions: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ];
    let mut vertices: Vec<Point> = raw
        .iter()
        .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
        .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    // Seed faces are all outward; subdivision preserves that.
    debug_assert!(triangles.iter().all(|&[a, b, c]| {
        (vertices[b] - vertices[a])
            .cross(&(vertices[c] - vertices[a]))
            .dot(&vertices[a])
            > 0.0
    }));
    let normals = vertices.clone();
    TriMesh::new(vertices, triangles).with_normals(normals)
}

pub fn sphere(center: Point, radius: f64, subdivisions: u32) -> TriMesh {
    let unit = icosphere(subdivisions);
    unit.transformed(|p| center + p * radius, |n| *n)
}

/// Surface of an ellipsoid with the given semi-axes, parametrised by the
/// outer normal so that the explicit vertex normals are exact.
pub fn ellipsoid(semi_axes: [f64; 3], subdivisions: u32) -> TriMesh {
    let unit = icosphere(subdivisions);
    let a2 = Vector3::new(
        semi_axes[0] * semi_axes[0],
        semi_axes[1] * semi_axes[1],
        semi_axes[2] * semi_axes[2],
    );
    unit.transformed(
        |u| {
            let au = a2.component_mul(u);
            au / u.dot(&au).sqrt()
        },
        |n| *n,
    )
}

/// Axis-aligned box `[lo, hi]` as 12 outward triangles.
pub fn box_mesh(lo: Point, hi: Point) -> TriMesh {
    let corner = |i: usize| {
        Vector3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        )
    };
    let vertices = (0..8).map(corner).collect();
    let quads = [
        [0, 2, 3, 1], // z = lo
        [4, 5, 7, 6], // z = hi
        [0, 1, 5, 4], // y = lo
        [2, 6, 7, 3], // y = hi
        [0, 4, 6, 2], // x = lo
        [1, 3, 7, 5], // x = hi
    ];
    let triangles = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    TriMesh::new(vertices, triangles)
}

/// Polar angles for one cap: uniform on `[0, θ_max − band]` with `rings`
/// steps, then `band_rings` finer steps across the seam band.
fn cap_angles(theta_max: f64, rings: usize, band: f64, band_rings: usize) -> Vec<f64> {
    let band = band.clamp(0.0, theta_max * 0.5);
    let split = theta_max - band;
    let mut out: Vec<f64> = (1..=rings).map(|i| split * i as f64 / rings as f64).collect();
    if band > 0.0 {
        out.extend((1..=band_rings).map(|i| split + band * i as f64 / band_rings as f64));
    }
    out
}

/// Resolution of a cap-body mesh. `seam_band` is the polar-angle width next
/// to the seam that receives `band_rings` extra rings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapMeshResolution {
    pub rings: usize,
    pub segments: usize,
    pub seam_band: f64,
    pub band_rings: usize,
}

impl Default for CapMeshResolution {
    fn default() -> Self {
        CapMeshResolution {
            rings: 96,
            segments: 384,
            seam_band: 0.1,
            band_rings: 24,
        }
    }
}

/// Two antipodal unit-sphere caps `{x·e₃ ≥ ε}`, `{x·e₃ ≤ −ε}` translated by
/// `∓ε e₃` so that their flat discs coincide in the plane `z = 0`.
///
/// No vertex normals are attached: the normal field jumps across the seam.
pub fn cap_body(epsilon: f64, res: CapMeshResolution) -> TriMesh {
    let theta_max = epsilon.acos();
    let thetas = cap_angles(theta_max, res.rings, res.seam_band, res.band_rings);
    let m = res.segments;
    let mut vertices = vec![Vector3::new(0.0, 0.0, 1.0 - epsilon)];
    for &theta in &thetas {
        for j in 0..m {
            let phi = 2.0 * PI * j as f64 / m as f64;
            vertices.push(Vector3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos() - epsilon,
            ));
        }
    }
    let seam_ring = thetas.len() - 1;
    // Lower cap: mirror every ring except the seam.
    for &theta in thetas[..seam_ring].iter().rev() {
        for j in 0..m {
            let phi = 2.0 * PI * j as f64 / m as f64;
            vertices.push(Vector3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                -(theta.cos() - epsilon),
            ));
        }
    }
    vertices.push(Vector3::new(0.0, 0.0, -(1.0 - epsilon)));
    let bottom = vertices.len() - 1;

    // Ring r (0-based over the full top-to-bottom sequence) starts at 1 + r·m.
    let ring_count = thetas.len() + seam_ring;
    let idx = |r: usize, j: usize| 1 + r * m + (j % m);
    let mut triangles = Vec::new();
    for j in 0..m {
        triangles.push([0, idx(0, j), idx(0, j + 1)]);
    }
    for r in 0..ring_count - 1 {
        for j in 0..m {
            let (a, b) = (idx(r, j), idx(r, j + 1));
            let (c, d) = (idx(r + 1, j), idx(r + 1, j + 1));
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
    }
    for j in 0..m {
        triangles.push([bottom, idx(ring_count - 1, j + 1), idx(ring_count - 1, j)]);
    }
    TriMesh::new(vertices, triangles)
}

/// Planar cap body: two circular arcs `{y ≥ ε}`, `{y ≤ −ε}` of the unit
/// circle translated to meet on the x-axis.
pub fn cap_body_curve(epsilon: f64, segments_per_arc: usize) -> Polyline {
    let theta_max = epsilon.acos();
    let mut vertices = Vec::with_capacity(2 * segments_per_arc);
    // Upper arc from the right seam point counter-clockwise to the left one.
    for i in 0..segments_per_arc {
        let theta = -theta_max + 2.0 * theta_max * i as f64 / segments_per_arc as f64;
        vertices.push(Vector3::new(-theta.sin(), theta.cos() - epsilon, 0.0));
    }
    for i in 0..segments_per_arc {
        let theta = -theta_max + 2.0 * theta_max * i as f64 / segments_per_arc as f64;
        vertices.push(Vector3::new(theta.sin(), -(theta.cos() - epsilon), 0.0));
    }
    Polyline::closed(vertices)
}

/// Circle polyline with outward vertex normals.
pub fn circle(center: Point, radius: f64, segments: usize) -> Polyline {
    let normals: Vec<Point> = (0..segments)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / segments as f64;
            Vector3::new(phi.cos(), phi.sin(), 0.0)
        })
        .collect();
    let vertices = normals.iter().map(|n| center + n * radius).collect();
    let mut p = Polyline::closed(vertices);
    p.normals = Some(normals);
    p
}

/// Open patch of a cylinder of the given radius around the z-axis, with
/// exact outward normals.
pub fn cylinder_patch(radius: f64, angular: usize, axial: usize, half_angle: f64, half_height: f64) -> TriMesh {
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    for i in 0..=axial {
        let z = -half_height + 2.0 * half_height * i as f64 / axial as f64;
        for j in 0..=angular {
            let phi = -half_angle + 2.0 * half_angle * j as f64 / angular as f64;
            let n = Vector3::new(phi.cos(), phi.sin(), 0.0);
            vertices.push(n * radius + Vector3::new(0.0, 0.0, z));
            normals.push(n);
        }
    }
    let triangles = grid_triangles(axial, angular, true);
    TriMesh::new(vertices, triangles).with_normals(normals)
}

/// Flat square patch in the plane `z = 0` with normal `e₃`.
pub fn flat_patch(cells: usize, half_width: f64) -> TriMesh {
    let mut vertices = Vec::new();
    for i in 0..=cells {
        for j in 0..=cells {
            vertices.push(Vector3::new(
                -half_width + 2.0 * half_width * j as f64 / cells as f64,
                -half_width + 2.0 * half_width * i as f64 / cells as f64,
                0.0,
            ));
        }
    }
    let normals = vec![Vector3::z(); vertices.len()];
    TriMesh::new(vertices, grid_triangles(cells, cells, true)).with_normals(normals)
}

fn grid_triangles(rows: usize, cols: usize, ccw_in_xy: bool) -> Vec<[usize; 3]> {
    let w = cols + 1;
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let a = i * w + j;
            let (b, c, d) = (a + 1, a + w, a + w + 1);
            if ccw_in_xy {
                out.push([a, b, d]);
                out.push([a, d, c]);
            } else {
                out.push([a, d, b]);
                out.push([a, c, d]);
            }
        }
    }
    out
}
