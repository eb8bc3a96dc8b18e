//! Run configuration for the verification harness, read from TOML.
//!
//! ```toml
//! seed = 42
//! theorems = ["HK-chain", "Umbilic"]   # omit to run everything
//!
//! [resolution]
//! quadrature_level = 5     # sphere quadrature refinement
//! grid_step = 0.02         # distance-field step, length units
//! mesh_subdivision = 5     # icosphere subdivisions for meshes
//! random_bodies = 50
//! hausdorff_samples = 10000
//! maclaurin_samples = 10000
//!
//! [tolerances]
//! compactness_deviation = 1e-2
//! ```

use serde::{Deserialize, Serialize};

use super::TheoremId;
use crate::error::{GeomError, Result};

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// `None` runs every experiment.
    #[serde(default)]
    pub theorems: Option<Vec<TheoremId>>,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            theorems: None,
            resolution: Resolution::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    pub quadrature_level: u32,
    pub grid_step: f64,
    pub mesh_subdivision: u32,
    pub random_bodies: usize,
    pub hausdorff_samples: usize,
    pub maclaurin_samples: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            quadrature_level: 5,
            grid_step: 0.02,
            mesh_subdivision: 5,
            random_bodies: 50,
            hausdorff_samples: 10_000,
            maclaurin_samples: 10_000,
        }
    }
}

/// Acceptance tolerances. Relative ones are fractions of the natural scale
/// of the quantity (volume, radius, curvature).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|gap| / V` for balls and `−gap / V` for everything else.
    pub hk_gap: f64,
    /// Ordering defect of the volume chain, absolute.
    pub chain_defect: f64,
    /// Closed-form cap-body ratio.
    pub cap_ratio: f64,
    /// Cap-body ratio through meshes, relative.
    pub cap_mesh_ratio: f64,
    pub divergence_identity: f64,
    pub cube_measures: f64,
    /// Voxel tube volumes against the Steiner polynomial, relative.
    pub tube_volume: f64,
    pub steiner_residual: f64,
    pub residual_ratio: f64,
    pub sphere_offset_curvature: f64,
    pub ellipsoid_offset_curvature: f64,
    pub sphere_fit: f64,
    pub threshold: f64,
    pub compactness_deviation: f64,
    pub maclaurin_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hk_gap: 1e-6,
            chain_defect: 1e-6,
            cap_ratio: 1e-9,
            cap_mesh_ratio: 1e-2,
            divergence_identity: 1e-12,
            cube_measures: 1e-8,
            tube_volume: 1e-2,
            steiner_residual: 5e-3,
            residual_ratio: 10.0,
            sphere_offset_curvature: 1e-3,
            ellipsoid_offset_curvature: 2e-2,
            sphere_fit: 1e-3,
            threshold: 1e-6,
            compactness_deviation: 1e-2,
            maclaurin_margin: 1e-12,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| GeomError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.resolution;
        if r.quadrature_level == 0 || r.mesh_subdivision == 0 {
            return Err(GeomError::Config("quadrature_level and mesh_subdivision must be positive".into()));
        }
        if !(r.grid_step > 0.0) || !r.grid_step.is_finite() {
            return Err(GeomError::Config(format!("grid_step must be positive, got {}", r.grid_step)));
        }
        if r.random_bodies == 0 || r.hausdorff_samples == 0 || r.maclaurin_samples == 0 {
            return Err(GeomError::Config("sample counts must be positive".into()));
        }
        if let Some(t) = &self.theorems {
            if t.is_empty() {
                return Err(GeomError::Config("theorem list is empty".into()));
            }
        }
        Ok(())
    }

    /// Selected experiments in canonical order, without duplicates.
    pub fn selected(&self) -> Vec<TheoremId> {
        match &self.theorems {
            None => TheoremId::ALL.to_vec(),
            Some(list) => TheoremId::ALL.iter().copied().filter(|t| list.contains(t)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_selection() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.selected().len(), 8);
        let cfg = RunConfig::from_toml("theorems = [\"HK-chain\"]\n").unwrap();
        assert_eq!(cfg.selected(), vec![TheoremId::HkChain]);
    }

    #[test]
    fn schema_violations() {
        for bad in [
            "theorems = [\"HK-everything\"]\n",
            "seeed = 3\n",
            "[resolution]\ngrid_step = -1.0\n",
            "[resolution]\nlevel = 3\n",
            "theorems = []\n",
        ] {
            assert!(matches!(RunConfig::from_toml(bad), Err(GeomError::Config(_))), "{bad}");
        }
    }
}
