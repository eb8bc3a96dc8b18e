//! Verification experiments: each one runs a fixed set of fixtures through
//! the other modules and records the quantities, the tolerances they were
//! held to and a verdict.

pub mod config;
mod experiments;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Resolution, RunConfig, Tolerances, DEFAULT_SEED};
pub use experiments::{compactness_experiment, hausdorff_to_unit_ball, verify_hk, verify_hk_threshold};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "HK-smooth")]
    HkSmooth,
    #[serde(rename = "HK-chain")]
    HkChain,
    #[serde(rename = "HK-threshold")]
    HkThreshold,
    Compactness,
    CapBody,
    SingularSeam,
    Umbilic,
    SteinerReach,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::HkSmooth,
        TheoremId::HkChain,
        TheoremId::HkThreshold,
        TheoremId::Compactness,
        TheoremId::CapBody,
        TheoremId::SingularSeam,
        TheoremId::Umbilic,
        TheoremId::SteinerReach,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::HkSmooth => "HK-smooth",
            TheoremId::HkChain => "HK-chain",
            TheoremId::HkThreshold => "HK-threshold",
            TheoremId::Compactness => "Compactness",
            TheoremId::CapBody => "CapBody",
            TheoremId::SingularSeam => "SingularSeam",
            TheoremId::Umbilic => "Umbilic",
            TheoremId::SteinerReach => "SteinerReach",
        }
    }

    /// Fixture names each experiment reports, in order.
    pub fn fixtures(self) -> &'static [&'static str] {
        match self {
            TheoremId::HkSmooth => &["ball-n1", "ball-n2", "ball-n2-r3", "ellipsoid-1-1-2", "random-suite"],
            TheoremId::HkChain => &[
                "ball",
                "ellipsoid-1-1-2",
                "sphere-offset-0.5",
                "ellipsoid-offset-0.25",
            ],
            TheoremId::HkThreshold => &[
                "ball-k1",
                "ball-k2",
                "capbody-0.5-k1",
                "ellipsoid-1-1-2-k1",
                "ellipsoid-1-1-2-k2",
                "newton-maclaurin",
            ],
            TheoremId::Compactness => &["capbody-family"],
            TheoremId::CapBody => &["closed-form-0.5", "mesh-0.5", "epsilon-grid"],
            TheoremId::SingularSeam => &["cube-measures", "cube-tubes", "capbody-seam", "capbody-tubes"],
            TheoremId::Umbilic => &["spheres", "ellipsoid-1-1-2", "two-spheres"],
            TheoremId::SteinerReach => &["cube", "lshape", "residual-ratio"],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    /// Bound the value was checked against, if any.
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub fixture: String,
    pub quantities: Vec<Quantity>,
    pub verdict: Verdict,
    pub reason: String,
}

impl FixtureResult {
    pub(crate) fn new(fixture: &str) -> Self {
        FixtureResult {
            fixture: fixture.to_string(),
            quantities: Vec::new(),
            verdict: Verdict::Pass,
            reason: String::new(),
        }
    }

    pub(crate) fn record(&mut self, name: &str, value: f64) {
        self.quantities.push(Quantity {
            name: name.to_string(),
            value,
            tolerance: None,
        });
    }

    /// Records a value with its bound and fails the fixture unless `ok`.
    pub(crate) fn check(&mut self, name: &str, value: f64, tolerance: f64, ok: bool, failure: impl FnOnce() -> String) {
        self.quantities.push(Quantity {
            name: name.to_string(),
            value,
            tolerance: Some(tolerance),
        });
        if !ok {
            self.fail(failure());
        }
    }

    pub(crate) fn fail(&mut self, reason: String) {
        self.verdict = Verdict::Fail;
        if !self.reason.is_empty() {
            self.reason.push_str("; ");
        }
        self.reason.push_str(&reason);
    }

    pub(crate) fn finish(mut self) -> Self {
        if self.verdict == Verdict::Pass && self.reason.is_empty() {
            self.reason = "all checks within tolerance".into();
        }
        self
    }

    /// A fixture whose computation itself failed.
    pub(crate) fn errored(fixture: &str, err: impl std::fmt::Display) -> Self {
        let mut f = FixtureResult::new(fixture);
        f.fail(format!("computation failed: {err}"));
        f
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub seed: u64,
    pub fixtures: Vec<FixtureResult>,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn new(theorem: TheoremId, seed: u64, fixtures: Vec<FixtureResult>) -> Self {
        let verdict = if fixtures.iter().any(|f| f.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if fixtures.iter().all(|f| f.verdict == Verdict::Skip) {
            Verdict::Skip
        } else {
            Verdict::Pass
        };
        TheoremReport {
            theorem,
            seed,
            fixtures,
            verdict,
        }
    }

    pub fn fixture(&self, name: &str) -> Option<&FixtureResult> {
        self.fixtures.iter().find(|f| f.fixture == name)
    }
}

pub fn run_experiment(id: TheoremId, cfg: &RunConfig) -> TheoremReport {
    let fixtures = match id {
        TheoremId::HkSmooth => experiments::hk_smooth(cfg),
        TheoremId::HkChain => experiments::hk_chain(cfg),
        TheoremId::HkThreshold => experiments::hk_threshold(cfg),
        TheoremId::Compactness => experiments::compactness(cfg),
        TheoremId::CapBody => experiments::cap_body(cfg),
        TheoremId::SingularSeam => experiments::singular_seam(cfg),
        TheoremId::Umbilic => experiments::umbilic(cfg),
        TheoremId::SteinerReach => experiments::steiner_reach(cfg),
    };
    TheoremReport::new(id, cfg.seed, fixtures)
}

/// Runs the selected experiments concurrently; reports come back in
/// canonical theorem order.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<TheoremReport>> {
    cfg.validate()?;
    Ok(cfg.selected().par_iter().map(|&id| run_experiment(id, cfg)).collect())
}

pub fn any_failed(reports: &[TheoremReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Fail)
}

pub fn reports_json(reports: &[TheoremReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialise");
    s.push('\n');
    s
}

/// One row per recorded quantity.
pub fn reports_csv(reports: &[TheoremReport]) -> String {
    let mut s = String::from("# convexlab harness summary v1\ntheorem,fixture,quantity,value,tolerance,verdict\n");
    for r in reports {
        for f in &r.fixtures {
            for q in &f.quantities {
                let tol = q.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{:.17e},{},{}",
                    r.theorem.name(),
                    f.fixture,
                    q.name,
                    q.value,
                    tol,
                    f.verdict.name()
                );
            }
        }
    }
    s
}


#[cfg(test)]
mod coverage {
    use super::*;

    /// Every theorem has an experiment, and each experiment reports exactly
    /// the fixtures it declares.
    #[test]
    fn coverage_manifest() {
        let cfg = RunConfig::from_toml("[resolution]\nquadrature_level = 3\nmesh_subdivision = 3\ngrid_step = 0.05\nrandom_bodies = 2\nhausdorff_samples = 100\nmaclaurin_samples = 100\n").unwrap();
        for id in TheoremId::ALL {
            let declared = id.fixtures();
            assert!(!declared.is_empty(), "{id:?}");
            let report = run_experiment(id, &cfg);
            let got: Vec<&str> = report.fixtures.iter().map(|f| f.fixture.as_str()).collect();
            assert_eq!(got, declared, "{id:?}");
            for f in &report.fixtures {
                assert!(!f.reason.is_empty());
            }
        }
    }
}
