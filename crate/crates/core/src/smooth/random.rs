//! Seeded random smooth convex bodies: a ball with small smooth bumps on its
//! support function, kept only if the convexity screen accepts it.

use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::evaluator::SupportEvaluator;
use super::support::{Bump, BumpySupport};
use crate::error::{GeomError, Result};
use crate::geometry::Dim;

/// Largest bump amplitude relative to the base radius.
pub const MAX_RELATIVE_AMPLITUDE: f64 = 0.05;
const MAX_ATTEMPTS: usize = 1000;

pub struct RandomBodyGenerator {
    rng: ChaCha8Rng,
    dim: Dim,
    level: u32,
    rejected: usize,
}

impl RandomBodyGenerator {
    pub fn new(seed: u64, dim: Dim, level: u32) -> Self {
        RandomBodyGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            level,
            rejected: 0,
        }
    }

    /// Number of candidates the convexity screen has thrown away so far.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn unit_direction(&mut self) -> Vector3<f64> {
        loop {
            let mut v = Vector3::new(
                self.rng.gen_range(-1.0..1.0),
                self.rng.gen_range(-1.0..1.0),
                self.rng.gen_range(-1.0..1.0),
            );
            v = self.dim.project(v);
            let r = v.norm();
            if r > 1e-3 && r <= 1.0 {
                return v / r;
            }
        }
    }

    pub fn candidate(&mut self) -> BumpySupport {
        let base = self.rng.gen_range(0.5..2.0);
        let count = self.rng.gen_range(3..=8);
        let bumps = (0..count)
            .map(|_| Bump {
                direction: self.unit_direction(),
                amplitude: base * MAX_RELATIVE_AMPLITUDE * self.rng.gen_range(0.0..=1.0),
                sharpness: self.rng.gen_range(1.0..=6.0),
            })
            .collect();
        BumpySupport { base, bumps }
    }

    /// Next candidate that passes the convexity screen.
    pub fn next_body(&mut self) -> Result<SupportEvaluator> {
        for _ in 0..MAX_ATTEMPTS {
            let h = Arc::new(self.candidate());
            match SupportEvaluator::new(self.dim, h, self.level) {
                Ok(ev) => return Ok(ev),
                Err(GeomError::ConvexityViolation { .. }) => self.rejected += 1,
                Err(e) => return Err(e),
            }
        }
        Err(GeomError::domain("random body generator rejected every candidate"))
    }
}
