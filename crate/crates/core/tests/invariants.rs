use std::f64::consts::PI;

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

use convexlab::bodies::{cap_body_metrics, divergence_volume, Body};
use convexlab::geometry::{Dim, Point};
use convexlab::harness::{reports_json, run_experiment, RunConfig, TheoremId};
use convexlab::mesh::generate;
use convexlab::mesh::BoundaryMesh;
use convexlab::polytope::{all_measures, steiner_coefficients_from_measures, FaceLattice};
use convexlab::smooth::hk::{proof_chain, smooth_curvature_measures};
use convexlab::smooth::random::RandomBodyGenerator;
use convexlab::smooth::{hk_functional, SupportEvaluator};
use convexlab::tube::{build_distance_field, extract_level_set, steiner_fit, BBox, ReachVerdict};
use convexlab::umbilic::{classify_surface, Classification};

fn sphere_points(dirs: &[(f64, f64)]) -> Vec<Point> {
    dirs.iter()
        .map(|&(z, phi)| {
            let s = (1.0 - z * z).sqrt();
            Vector3::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect()
}

fn vertex_cone_sum(lattice: &FaceLattice) -> f64 {
    lattice
        .faces_of_dim(0)
        .into_iter()
        .map(|v| lattice.normal_cone_measure(v).unwrap().spherical_measure)
        .sum()
}

fn voxel_count_volume(body: &Body, h: f64) -> f64 {
    let b = convexlab::tube::DistanceOracle::from_body(body).unwrap().bbox().padded(2.0 * h, body.dim());
    let field = build_distance_field(body, b, h).unwrap();
    let inside = field.values.iter().filter(|&&d| d == 0.0).count();
    inside as f64 * h.powi(body.dim().ambient() as i32)
}

// ---------------------------------------------------------------- bodies

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cap_ratio_exceeds_one_and_divergence_closes(eps in 1e-4f64..0.9999, n in 1usize..=2) {
        let m = cap_body_metrics(n, eps).unwrap();
        prop_assert!(m.ratio > 1.0);
        prop_assert!(m.divergence_defect().abs() <= 1e-12);
    }
}

#[test]
fn cap_ratio_increases_on_a_grid() {
    for n in [1, 2] {
        let ratios: Vec<f64> = (1..=100)
            .map(|i| cap_body_metrics(n, i as f64 / 101.0).unwrap().ratio)
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "n = {n}");
    }
}

#[test]
fn divergence_volume_agrees_with_voxel_counting() {
    for (body, mesh_res) in [(Body::unit_ball(Dim::Three), 5), (Body::unit_cube(), 0)] {
        let mesh = body.boundary_mesh(mesh_res).unwrap();
        let v = divergence_volume(&mesh).unwrap();
        let area = mesh.measure();
        for h in [0.05, 0.025] {
            let err = (voxel_count_volume(&body, h) - v).abs();
            assert!(err <= area * h, "h = {h}: error {err}");
        }
    }
}

// ------------------------------------------------------ smooth quadrature

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn random_bodies_satisfy_the_inequality_and_the_chain(seed in any::<u64>()) {
        let mut gen = RandomBodyGenerator::new(seed, Dim::Three, 4);
        let ev = gen.next_body().unwrap();
        let report = hk_functional(&ev).unwrap();
        prop_assert!(report.gap >= -1e-6 * report.volume, "gap {}", report.gap);
        let chain = proof_chain(&ev).unwrap();
        prop_assert!(chain.ordering_defect() <= 1e-6, "{chain:?}");
    }

    #[test]
    fn radii_are_translation_invariant(dx in -0.5f64..0.5, dy in -0.5f64..0.5, dz in -0.5f64..0.5, z in -1.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
        let ev = SupportEvaluator::from_body(&Body::ellipsoid(&[1.0, 1.2, 2.0]).unwrap(), 2).unwrap();
        let moved = ev.translated(Vector3::new(dx, dy, dz)).unwrap();
        let u = sphere_points(&[(z, phi)])[0];
        let a = ev.principal_data(&u).unwrap();
        let b = moved.principal_data(&u).unwrap();
        for (ra, rb) in a.radii.iter().zip(&b.radii) {
            prop_assert!((ra - rb).abs() <= 1e-6 * ra, "{ra} vs {rb}");
        }
    }
}

#[test]
fn quadrature_gap_differences_shrink() {
    let body = Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap();
    let gaps: Vec<f64> = (3..=6)
        .map(|l| hk_functional(&SupportEvaluator::from_body(&body, l).unwrap()).unwrap().gap)
        .collect();
    let diffs: Vec<f64> = gaps.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

#[test]
fn hk_scaling_law() {
    for body in [Body::ellipsoid(&[1.0, 1.0, 2.0]).unwrap(), Body::ellipsoid(&[1.0, 0.5]).unwrap()] {
        let ev = SupportEvaluator::from_body(&body, 5).unwrap();
        let p = (ev.dim().n() + 1) as i32;
        let base = hk_functional(&ev).unwrap();
        for lambda in [0.5, 2.0] {
            let r = hk_functional(&ev.scaled(lambda).unwrap()).unwrap();
            let s = lambda.powi(p);
            assert!((r.hk_integral - s * base.hk_integral).abs() <= 1e-9 * r.hk_integral);
            assert!((r.gap - s * base.gap).abs() <= 1e-9 * r.hk_integral);
        }
    }
}

// -------------------------------------------------------- polytope bundle

#[test]
fn vertex_cones_close_up_on_fixed_polytopes() {
    for body in [Body::unit_cube(), Body::regular_tetrahedron()] {
        let lattice = FaceLattice::build(&body).unwrap();
        assert!((vertex_cone_sum(&lattice) - 4.0 * PI).abs() <= 1e-8);
        let mc: f64 = lattice.vertex_cones_monte_carlo(1_000_000, 7).iter().sum();
        assert!((mc - 4.0 * PI).abs() <= 0.01 * 4.0 * PI);
    }
    let square = FaceLattice::build(&Body::unit_square()).unwrap();
    assert!((vertex_cone_sum(&square) - 2.0 * PI).abs() <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_hulls_close_up_and_split(dirs in proptest::collection::vec((-0.99f64..0.99, 0.0f64..std::f64::consts::TAU), 10)) {
        let lattice = match FaceLattice::from_points(Dim::Three, sphere_points(&dirs)) {
            Ok(l) => l,
            // Nearly coincident draws; nothing to check.
            Err(_) => return Ok(()),
        };
        prop_assert!((vertex_cone_sum(&lattice) - 4.0 * PI).abs() <= 1e-8);
        let measures = all_measures(&lattice).unwrap();
        let facet_area: f64 = lattice.faces_of_dim(2).into_iter().map(|f| lattice.face_measure(f)).sum();
        prop_assert!((measures[2].total - facet_area).abs() <= 1e-12 * facet_area);
        for m in &measures {
            prop_assert!((m.total - m.ac_part - m.sing_part).abs() <= 1e-12 * m.total.abs().max(1.0));
            if m.k < 2 {
                prop_assert_eq!(m.ac_part, 0.0);
            }
        }
    }
}

#[test]
fn tetrahedron_steiner_matches_tubes() {
    let body = Body::regular_tetrahedron();
    let lattice = FaceLattice::build(&body).unwrap();
    let poly = steiner_coefficients_from_measures(lattice.volume(), &all_measures(&lattice).unwrap()).unwrap();
    let oracle = convexlab::tube::DistanceOracle::from_body(&body).unwrap();
    let field = build_distance_field(&body, oracle.bbox().padded(0.45, Dim::Three), 0.02).unwrap();
    for rho in [0.1, 0.2, 0.3] {
        let v = field.offset_volume(rho).unwrap();
        let p = poly.evaluate(rho);
        assert!((v - p).abs() <= 0.01 * p, "rho {rho}: {v} vs {p}");
    }
}

#[test]
fn inscribed_polytopes_approach_the_ball() {
    let smooth = smooth_curvature_measures(&SupportEvaluator::from_body(&Body::unit_ball(Dim::Three), 5).unwrap()).unwrap();
    let errors: Vec<Vec<f64>> = [1, 2, 3]
        .into_iter()
        .map(|s| {
            let lattice = FaceLattice::from_points(Dim::Three, generate::icosphere(s).vertices).unwrap();
            all_measures(&lattice)
                .unwrap()
                .iter()
                .map(|m| (m.total - smooth[m.k]).abs())
                .collect()
        })
        .collect();
    // Total Gauss curvature is exact at every resolution.
    assert!(errors.iter().all(|e| e[0] <= 1e-9));
    for k in 1..3 {
        assert!(errors[1][k] < errors[0][k] && errors[2][k] < errors[1][k], "k = {k}: {errors:?}");
    }
}

// ---------------------------------------------------------------- tube lab

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fields_are_nonnegative_and_lipschitz(dirs in proptest::collection::vec((-0.99f64..0.99, 0.0f64..std::f64::consts::TAU), 6)) {
        let Ok(body) = Body::polytope(Dim::Three, sphere_points(&dirs)) else { return Ok(()) };
        let bbox = BBox::new(Vector3::repeat(-1.5), Vector3::repeat(1.5));
        let field = build_distance_field(&body, bbox, 0.1).unwrap();
        prop_assert!(field.values.iter().all(|&d| d >= 0.0));
        prop_assert!(field.lipschitz_ratio() <= 1.0 + 1e-12);
    }
}

#[test]
fn steiner_verdict_follows_the_residual() {
    let cases = [
        (Body::unit_square(), BBox::new(Vector3::new(-1.0, -1.0, 0.0), Vector3::new(2.0, 2.0, 0.0))),
        (
            Body::l_tromino(Dim::Two),
            BBox::new(Vector3::new(-1.5, -1.5, 0.0), Vector3::new(3.5, 3.5, 0.0)),
        ),
    ];
    for (body, bbox) in cases {
        let field = build_distance_field(&body, bbox, 0.01).unwrap();
        let radii: Vec<f64> = (1..=8).map(|i| 0.1 * i as f64).collect();
        let fit = steiner_fit(&field, &radii).unwrap();
        assert!(fit.residual >= 0.0);
        let violated = fit.residual > convexlab::tube::steiner::POLYNOMIALITY_THRESHOLD;
        assert_eq!(violated, fit.reach_verdict == ReachVerdict::PolynomialityViolated);
    }
}

#[test]
fn level_set_normals_are_unit() {
    let body = Body::unit_cube();
    let field = build_distance_field(&body, BBox::new(Vector3::repeat(-0.6), Vector3::repeat(1.6)), 0.05).unwrap();
    let s = extract_level_set(&field, 0.3).unwrap();
    assert!(s.normals.iter().all(|n| (n.norm() - 1.0).abs() <= 1e-9));
    assert!(matches!(s.mesh, BoundaryMesh::Surface(_)));
}

// ----------------------------------------------------------------- umbilic

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn classifier_is_invariant_under_similarities(
        axis in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        angle in 0.0f64..std::f64::consts::TAU,
        scale in 0.5f64..3.0,
        shift in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
    ) {
        let axis = Vector3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 0.1);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        let t = Vector3::new(shift.0, shift.1, shift.2);
        let motion = |p: &Point| rot * p * scale + t;
        let turn = |n: &Point| rot * n;

        let sphere = generate::sphere(Vector3::zeros(), 1.0, 4).transformed(motion, turn);
        let v = classify_surface(&sphere).unwrap();
        prop_assert_eq!(v.len(), 1);
        match v[0].classification {
            Classification::Sphere { center, radius } => {
                prop_assert!((Vector3::from(center) - t).norm() <= 1e-3 * scale);
                prop_assert!((radius - scale).abs() <= 1e-3 * scale);
            }
            ref other => prop_assert!(false, "sphere classified as {:?}", other),
        }

        let ellipsoid = generate::ellipsoid([1.0, 1.0, 2.0], 4).transformed(motion, turn);
        let v = classify_surface(&ellipsoid).unwrap();
        prop_assert_eq!(&v[0].classification, &Classification::Neither);
    }
}

#[test]
fn sphere_deviation_shrinks_and_spread_is_small() {
    // Face-averaged normals, so the estimate carries discretisation error.
    let verdict = |s: u32| {
        let mut m = generate::sphere(Vector3::zeros(), 1.0, s);
        m.normals = None;
        classify_surface(&m).unwrap().remove(0)
    };
    let coarse = verdict(3);
    let fine = verdict(4);
    assert!(fine.max_deviation < coarse.max_deviation, "{} vs {}", fine.max_deviation, coarse.max_deviation);

    let exact = classify_surface(&generate::sphere(Vector3::zeros(), 2.0, 5)).unwrap().remove(0);
    assert!(exact.kappa_spread <= 1e-3 * exact.curvature_scale);
}

// ----------------------------------------------------------------- harness

#[test]
fn reports_depend_only_on_the_seed() {
    let cfg = RunConfig::from_toml("seed = 9\n[resolution]\nquadrature_level = 3\nrandom_bodies = 4\n").unwrap();
    for id in [TheoremId::HkSmooth, TheoremId::Umbilic] {
        let a = reports_json(&[run_experiment(id, &cfg)]);
        let b = reports_json(&[run_experiment(id, &cfg)]);
        assert_eq!(a, b);
    }
}
