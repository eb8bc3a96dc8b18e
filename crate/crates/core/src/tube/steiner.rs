//! Polynomial fit of tube volumes. Sets of positive reach have tube volumes
//! that are polynomials of degree `n + 1` in the radius up to the reach; a
//! fit residual above the threshold flags a kink.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::field::DistanceField;
use crate::error::{GeomError, Result};

/// Residual above which polynomiality counts as violated, relative to the
/// volume scale.
pub const POLYNOMIALITY_THRESHOLD: f64 = 5e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReachVerdict {
    /// Volumes fit a polynomial: no evidence against reach at least `ρ_max`.
    ConsistentWithReach,
    PolynomialityViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerFit {
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// `V(ρ) ≈ Σ coefficients[j] ρʲ`, degree `n + 1`.
    pub coefficients: Vec<f64>,
    /// `max |fit − V| / v_scale`.
    pub residual: f64,
    /// Volume of the set itself, or of the smallest tube when the set has
    /// no volume.
    pub v_scale: f64,
    pub reach_verdict: ReachVerdict,
}

impl SteinerFit {
    pub fn evaluate(&self, rho: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * rho + c)
    }
}

pub fn steiner_fit(field: &DistanceField, radii: &[f64]) -> Result<SteinerFit> {
    let degree = field.dim.ambient();
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < degree + 2 {
        return Err(GeomError::IllConditioned(format!(
            "{} distinct radii, need at least {}",
            sorted.len(),
            degree + 2
        )));
    }
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if !(lo >= 0.0) {
        return Err(GeomError::domain("radii must be nonnegative"));
    }
    if hi - lo < 0.05 * hi {
        return Err(GeomError::IllConditioned(format!("radii span only [{lo}, {hi}]")));
    }
    let volumes = radii
        .iter()
        .map(|&r| field.offset_volume(r))
        .collect::<Result<Vec<_>>>()?;
    let base = field.offset_volume(0.0)?;
    let smallest = radii
        .iter()
        .zip(&volumes)
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map(|(_, v)| *v)
        .unwrap_or(0.0);
    let v_scale = if base > 0.0 { base } else { smallest };

    // Least squares in the scaled variable ρ / ρ_max.
    let m = radii.len();
    let design = DMatrix::from_fn(m, degree + 1, |i, j| (radii[i] / hi).powi(j as i32));
    let rhs = DVector::from_column_slice(&volumes);
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= 1e-12 * sv.max() {
        return Err(GeomError::IllConditioned("singular design matrix".into()));
    }
    let scaled = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| GeomError::IllConditioned(e.to_string()))?;
    let fitted = &design * &scaled;
    let residual = (0..m)
        .map(|i| (fitted[i] - volumes[i]).abs())
        .fold(0.0, f64::max)
        / v_scale;
    let coefficients = (0..=degree).map(|j| scaled[j] / hi.powi(j as i32)).collect();
    Ok(SteinerFit {
        radii: radii.to_vec(),
        volumes,
        coefficients,
        residual,
        v_scale,
        reach_verdict: if residual > POLYNOMIALITY_THRESHOLD {
            ReachVerdict::PolynomialityViolated
        } else {
            ReachVerdict::ConsistentWithReach
        },
    })
}

/// `n` evenly spaced radii from `lo` to `hi`.
pub fn radii_range(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;
    use crate::geometry::{Dim, Point};
    use crate::tube::field::build_distance_field;
    use crate::tube::oracle::BBox;
    use std::f64::consts::PI;

    #[test]
    fn cube_is_consistent() {
        let f = build_distance_field(&Body::unit_cube(), BBox::new(Point::repeat(-0.7), Point::repeat(1.7)), 0.02).unwrap();
        let fit = steiner_fit(&f, &radii_range(0.1, 0.6, 8)).unwrap();
        assert_eq!(fit.reach_verdict, ReachVerdict::ConsistentWithReach);
        assert!(fit.residual < 1e-2);
        for (c, w) in fit.coefficients.iter().zip([1.0, 6.0, 3.0 * PI, 4.0 * PI / 3.0]) {
            assert!((c - w).abs() < 0.05 * w.max(1.0), "{:?}", fit.coefficients);
        }
    }

    #[test]
    fn l_tromino_has_a_kink() {
        let f = build_distance_field(
            &Body::l_tromino(Dim::Two),
            BBox::new(Point::new(-3.2, -3.2, 0.0), Point::new(5.2, 5.2, 0.0)),
            0.02,
        )
        .unwrap();
        let fit = steiner_fit(&f, &radii_range(0.25, 3.0, 12)).unwrap();
        assert_eq!(fit.reach_verdict, ReachVerdict::PolynomialityViolated, "{}", fit.residual);
    }

    #[test]
    fn too_few_or_clustered_radii() {
        let f = build_distance_field(&Body::unit_cube(), BBox::new(Point::repeat(-0.5), Point::repeat(1.5)), 0.05).unwrap();
        assert!(matches!(steiner_fit(&f, &[0.1, 0.2, 0.3, 0.3]), Err(GeomError::IllConditioned(_))));
        assert!(matches!(
            steiner_fit(&f, &[0.300, 0.301, 0.302, 0.303, 0.304]),
            Err(GeomError::IllConditioned(_))
        ));
    }
}
