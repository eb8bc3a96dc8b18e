//! The Heintze–Karcher functional of a smooth convex body and the chain of
//! integral estimates that bounds its volume through the inner normal flow.

use serde::{Deserialize, Serialize};

use super::evaluator::{integrate_samples, BoundaryPointData, SupportEvaluator};
use crate::error::{GeomError, Result};
use crate::symmetric::elementary_symmetric_all;

/// Relative gap tolerance for the equality verdict.
pub const EQUALITY_GAP_TOL: f64 = 1e-5;
/// Curvature spread tolerance for the equality verdict, relative to the mean
/// curvature.
pub const EQUALITY_SPREAD_TOL: f64 = 1e-4;
/// Relative tolerance below zero that still counts as a valid inequality.
pub const NEGATIVE_GAP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HkVerdict {
    EqualityBall,
    StrictInequality,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkReport {
    pub volume: f64,
    pub area: f64,
    pub hk_integral: f64,
    /// `n/(n+1) · hk_integral − volume`.
    pub gap: f64,
    pub quadrature_level: u32,
    pub verdict: HkVerdict,
}

/// Largest minus smallest principal curvature over all samples, divided by
/// the area-weighted mean curvature.
pub fn curvature_spread(samples: &[BoundaryPointData]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in samples {
        for &k in &d.curvatures {
            lo = lo.min(k);
            hi = hi.max(k);
        }
    }
    let area = integrate_samples(samples, |_| 1.0);
    let mean = integrate_samples(samples, |d| d.curvatures.iter().sum::<f64>() / d.n() as f64) / area;
    (hi - lo) / mean
}

pub fn classify(volume: f64, gap: f64, spread: f64) -> HkVerdict {
    if gap.abs() <= EQUALITY_GAP_TOL * volume && spread <= EQUALITY_SPREAD_TOL {
        HkVerdict::EqualityBall
    } else if gap >= -NEGATIVE_GAP_TOL * volume {
        HkVerdict::StrictInequality
    } else {
        HkVerdict::Inconclusive
    }
}

pub fn hk_functional(body: &SupportEvaluator) -> Result<HkReport> {
    let samples = body.samples()?;
    Ok(hk_from_samples(&samples, body.level()))
}

pub fn hk_from_samples(samples: &[BoundaryPointData], level: u32) -> HkReport {
    let n = samples.first().map_or(1, BoundaryPointData::n) as f64;
    let area = integrate_samples(samples, |_| 1.0);
    let volume = integrate_samples(samples, |d| d.support_value()) / (n + 1.0);
    let hk_integral = integrate_samples(samples, |d| 1.0 / d.curvatures.iter().sum::<f64>());
    let gap = n / (n + 1.0) * hk_integral - volume;
    HkReport {
        volume,
        area,
        hk_integral,
        gap,
        quadrature_level: level,
        verdict: classify(volume, gap, curvature_spread(samples)),
    }
}

/// The four quantities of the volume estimate, in increasing order for every
/// convex body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofChain {
    pub volume: f64,
    /// `∫ ∫₀^{1/κ_max} Π (1 − tκⱼ) dt`: normal-flow volume up to the first
    /// focal point.
    pub jacobian_bound: f64,
    /// `∫ ∫₀^{1/κ_max} (1 − tH₁/n)ⁿ dt`, after the AM-GM step.
    pub tube_bound: f64,
    /// `n/(n+1) ∫ 1/H₁`.
    pub hk_bound: f64,
}

impl ProofChain {
    /// Largest violation of `volume ≤ tube ≤ hk` and `jacobian ≤ tube`,
    /// zero if ordered.
    pub fn ordering_defect(&self) -> f64 {
        [
            self.volume - self.tube_bound,
            self.jacobian_bound - self.tube_bound,
            self.tube_bound - self.hk_bound,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `∫₀^T (1 − a t)ⁿ dt` for `0 < aT ≤ 1`.
fn amgm_time_integral(a: f64, t_max: f64, n: usize) -> f64 {
    let m = (n + 1) as f64;
    (1.0 - (1.0 - a * t_max).powi(n as i32 + 1)) / (a * m)
}

/// `∫₀^T Π(1 − tκⱼ) dt = Σₖ (−1)ᵏ eₖ(κ) T^{k+1}/(k+1)`.
fn jacobian_time_integral(curvatures: &[f64], t_max: f64) -> f64 {
    elementary_symmetric_all(curvatures)
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * e * t_max.powi(k as i32 + 1) / (k + 1) as f64
        })
        .sum()
}

pub fn proof_chain(body: &SupportEvaluator) -> Result<ProofChain> {
    let samples = body.samples()?;
    let report = hk_from_samples(&samples, body.level());
    let mut jacobian_bound = 0.0;
    let mut tube_bound = 0.0;
    for d in &samples {
        let n = d.n();
        let kmax = d.curvatures.iter().copied().fold(0.0, f64::max);
        let t_max = 1.0 / kmax;
        let h1: f64 = d.curvatures.iter().sum();
        jacobian_bound += d.area_weight * jacobian_time_integral(&d.curvatures, t_max);
        tube_bound += d.area_weight * amgm_time_integral(h1 / n as f64, t_max, n);
    }
    Ok(ProofChain {
        volume: report.volume,
        jacobian_bound,
        tube_bound,
        hk_bound: report.gap + report.volume,
    })
}

/// The AM-GM tube bound alone.
pub fn tube_bound_via_normal_bundle(body: &SupportEvaluator) -> Result<f64> {
    Ok(proof_chain(body)?.tube_bound)
}

/// Totals `C_k = ∫_{∂K} H_{n−k}` for `k = 0..=n`, indexed by `k`.
pub fn smooth_curvature_measures(body: &SupportEvaluator) -> Result<Vec<f64>> {
    let samples = body.samples()?;
    let n = body.dim().n();
    Ok((0..=n)
        .map(|k| {
            integrate_samples(&samples, |d| elementary_symmetric_all(&d.curvatures)[n - k])
        })
        .collect())
}

/// Smallest pointwise `H_k` over the quadrature nodes.
pub fn min_mean_curvature(body: &SupportEvaluator, k: usize) -> Result<f64> {
    let n = body.dim().n();
    if k > n {
        return Err(GeomError::Index { k, n });
    }
    Ok(body
        .samples()?
        .iter()
        .map(|d| elementary_symmetric_all(&d.curvatures)[k])
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{reference_ball_report, Body};
    use crate::geometry::Dim;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn eval(body: &Body, level: u32) -> SupportEvaluator {
        SupportEvaluator::from_body(body, level).unwrap()
    }

    #[test]
    fn ball_is_an_equality_case() {
        for dim in [Dim::Two, Dim::Three] {
            let r = hk_functional(&eval(&Body::unit_ball(dim), 5)).unwrap();
            let exact = reference_ball_report(dim.n(), 1.0).unwrap();
            assert!((r.volume - exact.volume).abs() < 1e-6);
            assert!((r.hk_integral - exact.hk_integral).abs() < 1e-6);
            assert!(r.gap.abs() < 1e-6 * r.volume);
            assert_eq!(r.verdict, HkVerdict::EqualityBall);
        }
    }

    #[test]
    fn circle_of_radius_two() {
        let b = Body::ball(Dim::Two, Vector3::zeros(), 2.0).unwrap();
        let r = hk_functional(&eval(&b, 3)).unwrap();
        assert!((r.volume - 4.0 * PI).abs() < 1e-12);
        assert!((0.5 * r.hk_integral - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_is_strict() {
        let r = hk_functional(&eval(&Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap(), 5)).unwrap();
        assert!(r.gap > 1e-2, "{r:?}");
        assert_eq!(r.verdict, HkVerdict::StrictInequality);
        // Exact volume 8π/3.
        assert!((r.volume - 8.0 * PI / 3.0).abs() < 1e-3);
    }

    #[test]
    fn time_integrals_against_midpoint_rule() {
        let kappa = [0.7, 1.9];
        let t_max = 1.0 / 1.9;
        let steps = 200_000;
        let dt = t_max / steps as f64;
        let (mut jac, mut amgm) = (0.0, 0.0);
        for i in 0..steps {
            let t = (i as f64 + 0.5) * dt;
            jac += (1.0 - t * kappa[0]) * (1.0 - t * kappa[1]) * dt;
            amgm += (1.0 - t * (kappa[0] + kappa[1]) / 2.0).powi(2) * dt;
        }
        assert!((jacobian_time_integral(&kappa, t_max) - jac).abs() < 1e-10);
        assert!((amgm_time_integral(1.3, t_max, 2) - amgm).abs() < 1e-10);
    }

    #[test]
    fn ball_chain_collapses() {
        for r in [0.5, 1.0, 3.0] {
            let b = Body::ball(Dim::Three, Vector3::zeros(), r).unwrap();
            let c = proof_chain(&eval(&b, 4)).unwrap();
            let v = 4.0 * PI / 3.0 * r.powi(3);
            for q in [c.volume, c.jacobian_bound, c.tube_bound, c.hk_bound] {
                assert!((q - v).abs() < 1e-9 * v, "{c:?}");
            }
        }
    }

    #[test]
    fn ellipsoid_chain_is_strictly_ordered() {
        let c = proof_chain(&eval(&Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap(), 5)).unwrap();
        // On a prolate spheroid every inner normal meets the axis after
        // exactly 1/κ_max, so the first step is an identity.
        assert!((c.volume - c.jacobian_bound).abs() < 1e-5 * c.volume);
        assert!(c.volume < c.tube_bound);
        assert!(c.jacobian_bound < c.tube_bound);
        assert!(c.tube_bound < c.hk_bound);
    }

    #[test]
    fn unit_ball_measures() {
        let m = smooth_curvature_measures(&eval(&Body::unit_ball(Dim::Three), 4)).unwrap();
        for (got, want) in m.iter().zip([4.0 * PI, 8.0 * PI, 4.0 * PI]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(classify(1.0, 5e-6, 0.0), HkVerdict::EqualityBall);
        assert_eq!(classify(1.0, 5e-6, 1e-3), HkVerdict::StrictInequality);
        assert_eq!(classify(1.0, -2e-6, 1e-3), HkVerdict::Inconclusive);
    }
}
