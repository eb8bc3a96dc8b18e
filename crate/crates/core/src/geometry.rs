//! Small geometric helpers shared by every module.
//!
//! Points and directions are always stored as [`Vector3`]. Planar bodies live in
//! the `z = 0` plane and carry [`Dim::Two`]; their z-coordinates stay zero.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type Point = Vector3<f64>;

/// Ambient dimension `n + 1` of a body; the boundary has dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
}

impl Dim {
    pub fn from_ambient(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(GeomError::domain(format!(
                "ambient dimension {d} not supported (only 2 and 3)"
            ))),
        }
    }

    /// `n` from the `n`-dimensional boundary.
    pub fn from_boundary(n: usize) -> Result<Self> {
        Self::from_ambient(n + 1)
    }

    pub fn ambient(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Dimension of the boundary hypersurface.
    pub fn n(self) -> usize {
        self.ambient() - 1
    }

    /// `H^n(S^n)`.
    pub fn sphere_measure(self) -> f64 {
        match self {
            Dim::Two => 2.0 * PI,
            Dim::Three => 4.0 * PI,
        }
    }

    /// Volume of the unit ball in the ambient space.
    pub fn unit_ball_volume(self) -> f64 {
        match self {
            Dim::Two => PI,
            Dim::Three => 4.0 * PI / 3.0,
        }
    }

    /// Drops the z-coordinate of planar vectors.
    pub fn project(self, v: Point) -> Point {
        match self {
            Dim::Two => Vector3::new(v.x, v.y, 0.0),
            Dim::Three => v,
        }
    }
}

/// Orthonormal basis of `u⊥` (inside the plane for [`Dim::Two`]).
pub fn tangent_basis(u: &Point, dim: Dim) -> Vec<Point> {
    match dim {
        Dim::Two => vec![Vector3::new(-u.y, u.x, 0.0)],
        Dim::Three => {
            let (a, b) = orthonormal_pair(u);
            vec![a, b]
        }
    }
}

/// Two unit vectors completing `u` to a right-handed orthonormal frame.
pub fn orthonormal_pair(u: &Point) -> (Point, Point) {
    // Frisvad-style branchless construction, stable for all unit u.
    let sign = if u.z >= 0.0 { 1.0 } else { -1.0 };
    let a = -1.0 / (sign + u.z);
    let b = u.x * u.y * a;
    let t1 = Vector3::new(1.0 + sign * u.x * u.x * a, sign * b, -sign * u.x);
    let t2 = Vector3::new(b, sign + u.y * u.y * a, -u.y);
    (t1, t2)
}

/// Solid angle of the spherical triangle spanned by three unit vectors
/// (Van Oosterom–Strackee). Always non-negative.
pub fn spherical_triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Angle between two vectors in `[0, π]`, robust near 0 and π.
pub fn angle_between(a: &Point, b: &Point) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unit vector along `u`; errors on a zero vector.
pub fn normalized(u: &Point) -> Result<Point> {
    let norm = u.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(GeomError::domain("direction must be a nonzero finite vector"));
    }
    Ok(u / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octant_solid_angle() {
        let area = spherical_triangle_area(&Vector3::x(), &Vector3::y(), &Vector3::z());
        assert!((area - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn frame_is_orthonormal() {
        for u in [
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(0.0, 0.0, -1.0),
            Vector3::new(0.3, -0.4, 0.866_025_403_784_438_6).normalize(),
            Vector3::new(1.0, 0.0, -1e-12).normalize(),
        ] {
            let (a, b) = orthonormal_pair(&u);
            assert!(a.dot(&u).abs() < 1e-14 && b.dot(&u).abs() < 1e-14);
            assert!(a.dot(&b).abs() < 1e-14);
            assert!((a.norm() - 1.0).abs() < 1e-14 && (b.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(2, 1), 2.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
