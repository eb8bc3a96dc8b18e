use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FixtureResult, RunConfig, Tolerances};
use crate::bodies::{cap_body_metrics, divergence_volume, Body, BodyKind};
use crate::error::{GeomError, Result};
use crate::geometry::{angle_between, binomial, Dim, Point};
use crate::mesh::generate;
use crate::polytope::{all_measures, cap_body_measures, seam_angle, singular_seam_mass, steiner_coefficients_from_measures, FaceLattice};
use crate::smooth::hk::{hk_from_samples, proof_chain};
use crate::smooth::random::RandomBodyGenerator;
use crate::smooth::{hk_functional, HkVerdict, SupportEvaluator};
use crate::symmetric::{elementary_symmetric_all, newton_maclaurin_margin};
use crate::tube::steiner::radii_range;
use crate::tube::{build_distance_field, offset_curvature_check, steiner_fit, BBox, DistanceOracle, ReachVerdict};
use crate::umbilic::{classify_surface, Classification};

fn fixture(name: &str, run: impl FnOnce(&mut FixtureResult) -> Result<()>) -> FixtureResult {
    let mut f = FixtureResult::new(name);
    match run(&mut f) {
        Ok(()) => f.finish(),
        Err(e) => FixtureResult::errored(name, e),
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn evaluator(body: &Body, level: u32) -> Result<SupportEvaluator> {
    SupportEvaluator::from_body(body, level)
}

/// Checks the inequality on one body, and that equality is reported exactly
/// when the body is a ball.
pub fn verify_hk(name: &str, body: &SupportEvaluator, is_ball: bool, tol: &Tolerances) -> Result<FixtureResult> {
    let r = hk_functional(body)?;
    let mut f = FixtureResult::new(name);
    f.record("volume", r.volume);
    f.record("hk_integral", r.hk_integral);
    f.record("gap", r.gap);
    let rel = r.gap / r.volume;
    if is_ball {
        f.check("abs_relative_gap", rel.abs(), tol.hk_gap, rel.abs() <= tol.hk_gap, || {
            format!("ball gap {rel:e} of the volume")
        });
    } else {
        f.check("relative_gap", rel, -tol.hk_gap, rel >= -tol.hk_gap, || {
            format!("negative gap {rel:e} of the volume")
        });
    }
    let equality = r.verdict == HkVerdict::EqualityBall;
    f.check("equality_verdict", flag(equality), flag(is_ball), equality == is_ball, || {
        format!("verdict {:?} for a {}", r.verdict, if is_ball { "ball" } else { "non-ball" })
    });
    Ok(f.finish())
}

/// Compares the smallest `H_k` with the threshold
/// `μ = (H^n(∂K) / ((n+1)·V))^k · C(n,k)`: a ball sits exactly on it, any
/// other body must dip below it somewhere.
pub fn verify_hk_threshold(name: &str, body: &Body, k: usize, level: u32, tol: &Tolerances) -> Result<FixtureResult> {
    let n = body.dim().n();
    if k == 0 || k > n {
        return Err(GeomError::Index { k, n });
    }
    let c = binomial(n, k);
    let mut f = FixtureResult::new(name);
    let (ratio, min_hk, max_hk, is_ball) = match body.kind() {
        BodyKind::CapBody { epsilon } => {
            // Both caps are pieces of unit spheres, and the seam is null.
            let m = cap_body_metrics(n, *epsilon)?;
            (m.ratio, c, c, false)
        }
        kind => {
            let ev = evaluator(body, level)?;
            let samples = ev.samples()?;
            let r = hk_from_samples(&samples, level);
            let hk: Vec<f64> = samples.iter().map(|d| elementary_symmetric_all(&d.curvatures)[k]).collect();
            let lo = hk.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = hk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (r.area / ((n + 1) as f64 * r.volume), lo, hi, matches!(kind, BodyKind::Ball { .. }))
        }
    };
    let mu = ratio.powi(k as i32) * c;
    f.record("ratio", ratio);
    f.record("threshold", mu);
    f.record("min_hk", min_hk);
    f.record("max_hk", max_hk);
    if is_ball {
        let dev = (min_hk - mu).abs().max((max_hk - mu).abs()) / mu;
        f.check("relative_deviation_from_threshold", dev, tol.threshold, dev <= tol.threshold, || {
            format!("H_{k} of a ball differs from the threshold by {dev:e}")
        });
    } else {
        let below = min_hk / mu;
        f.check("min_hk_over_threshold", below, 1.0, below < 1.0, || {
            format!("min H_{k} = {min_hk} reaches the threshold {mu} on a non-ball")
        });
    }
    Ok(f.finish())
}

/// Points spread evenly over the unit sphere (or circle in the plane).
fn fibonacci_directions(dim: Dim, count: usize) -> Vec<Point> {
    match dim {
        Dim::Two => (0..count)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                Vector3::new(t.cos(), t.sin(), 0.0)
            })
            .collect(),
        Dim::Three => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    Vector3::new(r * t.cos(), r * t.sin(), z)
                })
                .collect()
        }
    }
}

/// Sampled Hausdorff distance between a body and the unit ball: the larger
/// of the two directed distances over `samples` boundary points.
pub fn hausdorff_to_unit_ball(body: &Body, samples: usize) -> Result<f64> {
    let oracle = DistanceOracle::from_body(body)?;
    let mut worst = 0.0f64;
    for u in fibonacci_directions(body.dim(), samples) {
        let (d, q) = oracle.nearest(&u);
        worst = worst.max(d).max(q.norm() - 1.0);
    }
    Ok(worst)
}

/// Runs the cap-body family `ε_i` through the threshold: for each member
/// the `L¹` distance of `H_k ≡ C(n,k)` from its threshold and the Hausdorff
/// distance to the unit ball, both of which must shrink to zero.
pub fn compactness_experiment(
    name: &str,
    epsilons: &[f64],
    k: usize,
    samples: usize,
    tol: &Tolerances,
) -> Result<FixtureResult> {
    let n = 2;
    if k == 0 || k > n {
        return Err(GeomError::Index { k, n });
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(GeomError::domain("epsilons must be strictly decreasing"));
    }
    let c = binomial(n, k);
    let mut f = FixtureResult::new(name);
    let mut deviations = Vec::new();
    let mut distances = Vec::new();
    for (i, &eps) in epsilons.iter().enumerate() {
        let m = cap_body_metrics(n, eps)?;
        let mu = m.ratio.powi(k as i32) * c;
        let deviation = (c - mu).abs() * m.boundary_area();
        let d = hausdorff_to_unit_ball(&Body::cap_body(Dim::Three, eps)?, samples)?;
        f.record(&format!("eps_{i}"), eps);
        f.record(&format!("threshold_{i}"), mu);
        f.record(&format!("deviation_{i}"), deviation);
        f.check(&format!("hausdorff_{i}"), d, eps, d < eps, || {
            format!("Hausdorff distance {d} not below ε = {eps}")
        });
        deviations.push(deviation);
        distances.push(d);
    }
    let decreasing = deviations.windows(2).all(|w| w[1] < w[0]);
    f.check("deviation_strictly_decreasing", flag(decreasing), 1.0, decreasing, || {
        "curvature deviation is not strictly decreasing".into()
    });
    let last = *deviations.last().unwrap_or(&f64::INFINITY);
    f.check("final_deviation", last, tol.compactness_deviation, last < tol.compactness_deviation, || {
        format!(
            "final curvature deviation {last:.6} is not below {}; it decays like 4πε",
            tol.compactness_deviation
        )
    });
    let monotone = distances.windows(2).all(|w| w[1] < w[0]);
    f.check("hausdorff_decreasing", flag(monotone), 1.0, monotone, || {
        "Hausdorff distances are not decreasing".into()
    });
    Ok(f.finish())
}

pub(super) fn hk_smooth(cfg: &RunConfig) -> Vec<FixtureResult> {
    let level = cfg.resolution.quadrature_level;
    let tol = &cfg.tolerances;
    let single = |name: &str, body: Result<Body>, is_ball: bool| {
        body.and_then(|b| evaluator(&b, level))
            .and_then(|ev| verify_hk(name, &ev, is_ball, tol))
            .unwrap_or_else(|e| FixtureResult::errored(name, e))
    };
    let mut out = vec![
        single("ball-n1", Ok(Body::unit_ball(Dim::Two)), true),
        single("ball-n2", Ok(Body::unit_ball(Dim::Three)), true),
        single("ball-n2-r3", Body::ball(Dim::Three, Vector3::zeros(), 3.0), true),
        single("ellipsoid-1-1-2", Body::ellipsoid(&[1.0, 1.0, 2.0]), false),
    ];
    out.push(fixture("random-suite", |f| {
        let mut generator = RandomBodyGenerator::new(cfg.seed, Dim::Three, level);
        let mut failures = 0usize;
        let mut min_gap = f64::INFINITY;
        for i in 0..cfg.resolution.random_bodies {
            let ev = generator.next_body()?;
            let r = verify_hk(&format!("random-{i}"), &ev, false, tol)?;
            let gap = r.quantities.iter().find(|q| q.name == "relative_gap").map_or(f64::NAN, |q| q.value);
            min_gap = min_gap.min(gap);
            if r.verdict != super::Verdict::Pass {
                failures += 1;
            }
        }
        f.record("bodies", cfg.resolution.random_bodies as f64);
        f.record("rejected_candidates", generator.rejected() as f64);
        f.check("min_relative_gap", min_gap, -tol.hk_gap, min_gap >= -tol.hk_gap, || {
            format!("smallest relative gap {min_gap:e}")
        });
        f.check("failures", failures as f64, 0.0, failures == 0, || format!("{failures} bodies failed"));
        Ok(())
    }));
    out
}

pub(super) fn hk_chain(cfg: &RunConfig) -> Vec<FixtureResult> {
    let level = cfg.resolution.quadrature_level;
    let sub = cfg.resolution.mesh_subdivision;
    let tol = &cfg.tolerances;
    let chain = |name: &str, body: Result<Body>, is_ball: bool| {
        fixture(name, |f| {
            let c = proof_chain(&evaluator(&body?, level)?)?;
            f.record("volume", c.volume);
            f.record("jacobian_bound", c.jacobian_bound);
            f.record("tube_bound", c.tube_bound);
            f.record("hk_bound", c.hk_bound);
            let defect = c.ordering_defect();
            f.check("ordering_defect", defect, tol.chain_defect, defect <= tol.chain_defect, || {
                format!("chain out of order by {defect:e}")
            });
            if is_ball {
                let spread = [c.jacobian_bound, c.tube_bound, c.hk_bound]
                    .iter()
                    .map(|q| (q - c.volume).abs())
                    .fold(0.0, f64::max)
                    / c.volume;
                f.check("relative_spread", spread, tol.chain_defect, spread <= tol.chain_defect, || {
                    format!("ball chain does not collapse: spread {spread:e}")
                });
            }
            Ok(())
        })
    };
    let offset = |name: &str, body: Result<Body>, r: f64, bound: f64| {
        fixture(name, |f| {
            let rep = offset_curvature_check(&evaluator(&body?, level)?, r, sub)?;
            f.record("offset", r);
            f.record("vertices", rep.vertices as f64);
            f.record("skipped", rep.skipped as f64);
            let d = rep.max_relative_deviation;
            f.check("max_relative_deviation", d, bound, d <= bound, || {
                format!("offset curvature deviates by {d:e}")
            });
            Ok(())
        })
    };
    vec![
        chain("ball", Ok(Body::unit_ball(Dim::Three)), true),
        chain("ellipsoid-1-1-2", Body::ellipsoid(&[1.0, 1.0, 2.0]), false),
        offset("sphere-offset-0.5", Ok(Body::unit_ball(Dim::Three)), 0.5, tol.sphere_offset_curvature),
        offset(
            "ellipsoid-offset-0.25",
            Body::ellipsoid(&[1.0, 1.0, 2.0]),
            0.25,
            tol.ellipsoid_offset_curvature,
        ),
    ]
}

pub(super) fn hk_threshold(cfg: &RunConfig) -> Vec<FixtureResult> {
    let level = cfg.resolution.quadrature_level;
    let tol = &cfg.tolerances;
    let case = |name: &str, body: Result<Body>, k: usize| {
        body.and_then(|b| verify_hk_threshold(name, &b, k, level, tol))
            .unwrap_or_else(|e| FixtureResult::errored(name, e))
    };
    let ellipsoid = || Body::ellipsoid(&[1.0, 1.0, 2.0]);
    let mut out = vec![
        case("ball-k1", Ok(Body::unit_ball(Dim::Three)), 1),
        case("ball-k2", Ok(Body::unit_ball(Dim::Three)), 2),
        case("capbody-0.5-k1", Body::cap_body(Dim::Three, 0.5), 1),
        case("ellipsoid-1-1-2-k1", ellipsoid(), 1),
        case("ellipsoid-1-1-2-k2", ellipsoid(), 2),
    ];
    out.push(fixture("newton-maclaurin", |f| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
        let mut worst = f64::INFINITY;
        for _ in 0..cfg.resolution.maclaurin_samples {
            let n = rng.gen_range(1..=3);
            let kappa: Vec<f64> = (0..n)
                .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..10.0) })
                .collect();
            let k = rng.gen_range(1..=n);
            worst = worst.min(newton_maclaurin_margin(&kappa, k)?);
        }
        f.record("samples", cfg.resolution.maclaurin_samples as f64);
        f.check("min_margin", worst, -tol.maclaurin_margin, worst >= -tol.maclaurin_margin, || {
            format!("margin {worst:e} below zero")
        });
        Ok(())
    }));
    out
}

pub(super) fn compactness(cfg: &RunConfig) -> Vec<FixtureResult> {
    let eps: Vec<f64> = (1..=6).map(|i| 0.5f64.powi(i)).collect();
    vec![
        compactness_experiment("capbody-family", &eps, 1, cfg.resolution.hausdorff_samples, &cfg.tolerances)
            .unwrap_or_else(|e| FixtureResult::errored("capbody-family", e)),
    ]
}

pub(super) fn cap_body(cfg: &RunConfig) -> Vec<FixtureResult> {
    let tol = &cfg.tolerances;
    vec![
        fixture("closed-form-0.5", |f| {
            let eps = 0.5;
            let m = cap_body_metrics(2, eps)?;
            f.record("cap_area", m.cap_area);
            f.record("disc_area", m.disc_area);
            f.record("half_volume", m.half_volume);
            let err = (m.ratio - 1.6).abs();
            f.check("ratio_error", err, tol.cap_ratio, err <= tol.cap_ratio, || format!("ratio {}", m.ratio));
            let simplified = 2.0 / ((1.0 - eps) * (2.0 + eps));
            let err = (m.ratio - simplified).abs();
            f.check("simplified_form_error", err, tol.cap_ratio, err <= tol.cap_ratio, || {
                format!("closed form {simplified} vs {}", m.ratio)
            });
            let defect = m.divergence_defect().abs();
            f.check("divergence_defect", defect, tol.divergence_identity, defect <= tol.divergence_identity, || {
                format!("divergence identity off by {defect:e}")
            });
            Ok(())
        }),
        fixture("mesh-0.5", |f| {
            let body = Body::cap_body(Dim::Three, 0.5)?;
            let mesh = body.boundary_mesh(cfg.resolution.mesh_subdivision)?;
            let area = mesh.measure();
            let volume = divergence_volume(&mesh)?;
            let ratio = area / (3.0 * volume);
            f.record("mesh_area", area);
            f.record("mesh_volume", volume);
            f.record("mesh_ratio", ratio);
            let err = (ratio - 1.6).abs() / 1.6;
            f.check("relative_error", err, tol.cap_mesh_ratio, err <= tol.cap_mesh_ratio, || {
                format!("mesh ratio {ratio}")
            });
            Ok(())
        }),
        fixture("epsilon-grid", |f| {
            for n in [1, 2] {
                let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
                let metrics = grid.iter().map(|&e| cap_body_metrics(n, e)).collect::<Result<Vec<_>>>()?;
                let min_excess = metrics.iter().map(|m| m.ratio - 1.0).fold(f64::INFINITY, f64::min);
                let increasing = metrics.windows(2).all(|w| w[1].ratio > w[0].ratio);
                let defect = metrics.iter().map(|m| m.divergence_defect().abs()).fold(0.0, f64::max);
                f.check(&format!("n{n}_min_ratio_excess"), min_excess, 0.0, min_excess > 0.0, || {
                    format!("ratio reaches 1 for n = {n}")
                });
                f.check(&format!("n{n}_increasing"), flag(increasing), 1.0, increasing, || {
                    format!("ratio not increasing in ε for n = {n}")
                });
                f.check(&format!("n{n}_max_divergence_defect"), defect, tol.divergence_identity, defect <= tol.divergence_identity, || {
                    format!("divergence identity off by {defect:e} for n = {n}")
                });
            }
            Ok(())
        }),
    ]
}

fn tube_volume_checks(f: &mut FixtureResult, body: &Body, exact: impl Fn(f64) -> f64, margin: f64, h: f64, tol: f64) -> Result<()> {
    let field = build_distance_field(body, BBox::new(Point::repeat(-margin), Point::repeat(1.0 + margin)), h)?;
    for rho in [0.1, 0.2, 0.3] {
        let v = field.offset_volume(rho)?;
        let want = exact(rho);
        let err = (v - want).abs() / want;
        f.record(&format!("volume_{rho}"), v);
        f.check(&format!("relative_error_{rho}"), err, tol, err <= tol, || {
            format!("tube volume at {rho} is {v}, polynomial gives {want}")
        });
    }
    Ok(())
}

pub(super) fn singular_seam(cfg: &RunConfig) -> Vec<FixtureResult> {
    let tol = &cfg.tolerances;
    let h = cfg.resolution.grid_step;
    vec![
        fixture("cube-measures", |f| {
            let cube = FaceLattice::build(&Body::unit_cube())?;
            let m = all_measures(&cube)?;
            for (r, want) in m.iter().zip([4.0 * PI, 6.0 * PI, 6.0]) {
                let err = (r.total - want).abs();
                f.check(&format!("c{}_error", r.k), err, tol.cube_measures, err <= tol.cube_measures, || {
                    format!("C_{} = {}", r.k, r.total)
                });
            }
            let split = m[0].ac_part.abs() + m[1].ac_part.abs() + m[2].sing_part.abs();
            f.check("ac_sing_split_error", split, tol.cube_measures, split <= tol.cube_measures, || {
                "flat facets carry all of C_2 and nothing else".into()
            });
            Ok(())
        }),
        fixture("cube-tubes", |f| {
            let cube = FaceLattice::build(&Body::unit_cube())?;
            let p = steiner_coefficients_from_measures(cube.volume(), &all_measures(&cube)?)?;
            tube_volume_checks(f, &Body::unit_cube(), |r| p.evaluate(r), 0.4, h, tol.tube_volume)
        }),
        fixture("capbody-seam", |f| {
            let eps = 0.5;
            let m = cap_body_measures(Dim::Three, eps)?;
            for r in &m {
                f.record(&format!("c{}_ac", r.k), r.ac_part);
                f.record(&format!("c{}_sing", r.k), r.sing_part);
            }
            let gauss = (m[0].total - 4.0 * PI).abs();
            f.check("c0_minus_sphere", gauss, tol.cube_measures, gauss <= tol.cube_measures, || {
                format!("C_0 = {}", m[0].total)
            });
            // Normals of the two caps at a seam point, from their centres.
            let seam_r = (1.0 - eps * eps).sqrt();
            let x = Vector3::new(seam_r, 0.0, 0.0);
            let upper = x - Vector3::new(0.0, 0.0, -eps);
            let lower = x - Vector3::new(0.0, 0.0, eps);
            let angle = angle_between(&upper, &lower);
            let err = (angle - seam_angle(eps)).abs();
            f.check("seam_angle_error", err, tol.cube_measures, err <= tol.cube_measures, || {
                format!("normals meet at {angle}")
            });
            let mass = singular_seam_mass(eps)?;
            let err = (mass - 2.0 * PI * seam_r * angle).abs();
            f.check("seam_mass_error", err, tol.cube_measures, err <= tol.cube_measures, || {
                format!("seam mass {mass}")
            });
            Ok(())
        }),
        fixture("capbody-tubes", |f| {
            let eps = 0.5;
            let body = Body::cap_body(Dim::Three, eps)?;
            let m = cap_body_measures(Dim::Three, eps)?;
            let p = steiner_coefficients_from_measures(cap_body_metrics(2, eps)?.volume(), &m)?;
            let field = build_distance_field(&body, BBox::new(Point::repeat(-1.45), Point::repeat(1.45)), h)?;
            for rho in [0.1, 0.2, 0.3] {
                let v = field.offset_volume(rho)?;
                let want = p.evaluate(rho);
                let err = (v - want).abs() / want;
                f.record(&format!("volume_{rho}"), v);
                f.check(&format!("relative_error_{rho}"), err, tol.tube_volume, err <= tol.tube_volume, || {
                    format!("tube volume at {rho} is {v}, polynomial gives {want}")
                });
            }
            Ok(())
        }),
    ]
}

fn sphere_checks(f: &mut FixtureResult, label: &str, verdict: &Classification, center: Point, radius: f64, tol: f64) {
    match verdict {
        Classification::Sphere { center: c, radius: r } => {
            let ce = (Point::from(*c) - center).norm() / radius;
            let re = (r - radius).abs() / radius;
            f.check(&format!("{label}_center_error"), ce, tol, ce < tol, || format!("{label}: centre off by {ce:e}"));
            f.check(&format!("{label}_radius_error"), re, tol, re < tol, || format!("{label}: radius off by {re:e}"));
        }
        other => f.fail(format!("{label}: classified as {other:?}")),
    }
}

pub(super) fn umbilic(cfg: &RunConfig) -> Vec<FixtureResult> {
    let sub = cfg.resolution.mesh_subdivision;
    let tol = cfg.tolerances.sphere_fit;
    vec![
        fixture("spheres", |f| {
            let cases = [
                (Point::zeros(), 1.0, sub),
                (Vector3::new(0.3, -0.2, 0.1), 1.7, sub.saturating_sub(1).max(3)),
                (Point::zeros(), 1.0, 3),
            ];
            for (i, (c, r, s)) in cases.iter().enumerate() {
                let v = classify_surface(&generate::sphere(*c, *r, *s))?;
                f.record(&format!("sphere{i}_components"), v.len() as f64);
                f.record(&format!("sphere{i}_max_deviation"), v[0].max_deviation);
                sphere_checks(f, &format!("sphere{i}"), &v[0].classification, *c, *r, tol);
            }
            Ok(())
        }),
        fixture("ellipsoid-1-1-2", |f| {
            for s in 3..=sub.max(3) {
                let v = classify_surface(&generate::ellipsoid([1.0, 1.0, 2.0], s))?;
                f.record(&format!("subdivision{s}_max_deviation"), v[0].max_deviation);
                let neither = v.len() == 1 && v[0].classification == Classification::Neither;
                f.check(&format!("subdivision{s}_neither"), flag(neither), 1.0, neither, || {
                    format!("subdivision {s}: {:?}", v[0].classification)
                });
            }
            Ok(())
        }),
        fixture("two-spheres", |f| {
            let s = sub.saturating_sub(1).max(3);
            let (c1, c2) = (Vector3::new(-2.0, 0.0, 0.0), Vector3::new(2.0, 0.0, 0.0));
            let mesh = generate::sphere(c1, 1.0, s).merged(&generate::sphere(c2, 0.5, s));
            let v = classify_surface(&mesh)?;
            f.check("components", v.len() as f64, 2.0, v.len() == 2, || format!("{} components", v.len()));
            if v.len() == 2 {
                sphere_checks(f, "first", &v[0].classification, c1, 1.0, tol);
                sphere_checks(f, "second", &v[1].classification, c2, 0.5, tol);
            }
            Ok(())
        }),
    ]
}

pub(super) fn steiner_reach(cfg: &RunConfig) -> Vec<FixtureResult> {
    let tol = &cfg.tolerances;
    let h = cfg.resolution.grid_step;
    let cube = build_distance_field(&Body::unit_cube(), BBox::new(Point::repeat(-0.7), Point::repeat(1.7)), h)
        .and_then(|field| steiner_fit(&field, &radii_range(0.1, 0.6, 8)));
    let lshape = build_distance_field(
        &Body::l_tromino(Dim::Two),
        BBox::new(Point::new(-3.2, -3.2, 0.0), Point::new(5.2, 5.2, 0.0)),
        h,
    )
    .and_then(|field| steiner_fit(&field, &radii_range(0.25, 3.0, 12)));
    let mut out = Vec::new();
    out.push(fixture("cube", |f| {
        let fit = cube.as_ref().map_err(clone_err)?;
        for (j, c) in fit.coefficients.iter().enumerate() {
            f.record(&format!("coefficient_{j}"), *c);
        }
        f.check("residual", fit.residual, tol.steiner_residual, fit.residual < tol.steiner_residual, || {
            format!("residual {:e}", fit.residual)
        });
        let ok = fit.reach_verdict == ReachVerdict::ConsistentWithReach;
        f.check("consistent_with_reach", flag(ok), 1.0, ok, || format!("{:?}", fit.reach_verdict));
        Ok(())
    }));
    out.push(fixture("lshape", |f| {
        let fit = lshape.as_ref().map_err(clone_err)?;
        f.record("residual", fit.residual);
        let ok = fit.reach_verdict == ReachVerdict::PolynomialityViolated;
        f.check("polynomiality_violated", flag(ok), 1.0, ok, || format!("{:?}", fit.reach_verdict));
        Ok(())
    }));
    out.push(fixture("residual-ratio", |f| {
        let (c, l) = (cube.as_ref().map_err(clone_err)?, lshape.as_ref().map_err(clone_err)?);
        let ratio = l.residual / c.residual;
        f.check("ratio", ratio, tol.residual_ratio, ratio >= tol.residual_ratio, || {
            format!("L-shape residual only {ratio:.2} times the cube's")
        });
        Ok(())
    }));
    out
}

fn clone_err(e: &GeomError) -> GeomError {
    GeomError::domain(e.to_string())
}

