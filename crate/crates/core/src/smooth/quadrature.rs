//! Quadrature on the unit sphere of directions.
//!
//! Circles use the uniform trapezoid rule with `8·2^level` nodes. Two-spheres
//! use the vertices of a level-`level` icosphere weighted by the area of their
//! spherical Voronoi cells, which tile the sphere exactly.

use nalgebra::Vector3;

use crate::geometry::{spherical_triangle_area, Dim, Point};
use crate::mesh::generate::icosphere;

#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    pub dim: Dim,
    pub level: u32,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    /// Icosphere connectivity (spatial case only).
    pub triangles: Option<Vec<[usize; 3]>>,
}

impl SphereQuadrature {
    pub fn new(dim: Dim, level: u32) -> Self {
        match dim {
            Dim::Two => {
                let count = 8usize << level;
                let w = std::f64::consts::TAU / count as f64;
                let nodes = (0..count)
                    .map(|i| {
                        let phi = std::f64::consts::TAU * i as f64 / count as f64;
                        Vector3::new(phi.cos(), phi.sin(), 0.0)
                    })
                    .collect();
                SphereQuadrature {
                    dim,
                    level,
                    nodes,
                    weights: vec![w; count],
                    triangles: None,
                }
            }
            Dim::Three => {
                let mesh = icosphere(level);
                let weights = voronoi_weights(&mesh.vertices, &mesh.triangles);
                SphereQuadrature {
                    dim,
                    level,
                    nodes: mesh.vertices,
                    weights,
                    triangles: Some(mesh.triangles),
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(uᵢ)` accumulated in node order.
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * f(u))
            .sum()
    }
}

/// Spherical Voronoi cell areas of the vertices of an acute spherical
/// triangulation. Each triangle is split into three kites through its
/// circumcentre and the edge midpoints.
fn voronoi_weights(vertices: &[Point], triangles: &[[usize; 3]]) -> Vec<f64> {
    let mut w = vec![0.0; vertices.len()];
    for tri in triangles {
        let [a, b, c] = tri.map(|i| vertices[i]);
        let mut o = (b - a).cross(&(c - a)).normalize();
        if o.dot(&(a + b + c)) < 0.0 {
            o = -o;
        }
        let mab = (a + b).normalize();
        let mbc = (b + c).normalize();
        let mca = (c + a).normalize();
        w[tri[0]] += spherical_triangle_area(&a, &mab, &o) + spherical_triangle_area(&a, &o, &mca);
        w[tri[1]] += spherical_triangle_area(&b, &mbc, &o) + spherical_triangle_area(&b, &o, &mab);
        w[tri[2]] += spherical_triangle_area(&c, &mca, &o) + spherical_triangle_area(&c, &o, &mbc);
    }
    w
}
