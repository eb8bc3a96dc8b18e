use std::f64::consts::PI;

use convexlab::bodies::{Body, SampledSet};
use convexlab::geometry::{Dim, Point};
use convexlab::mesh::BoundaryMesh;
use convexlab::tube::steiner::radii_range;
use convexlab::tube::{build_distance_field, extract_level_set, steiner_fit, BBox, ReachVerdict};
use nalgebra::Vector3;

fn cube_field(h: f64, margin: f64) -> convexlab::tube::DistanceField {
    build_distance_field(
        &Body::unit_cube(),
        BBox::new(Point::repeat(-margin), Point::repeat(1.0 + margin)),
        h,
    )
    .unwrap()
}

fn surface_area(s: &convexlab::tube::OffsetSurface) -> f64 {
    s.mesh.measure()
}

#[test]
fn coarea_ball_and_cube() {
    let h = 0.02;
    let ball = build_distance_field(
        &Body::unit_ball(Dim::Three),
        BBox::new(Point::repeat(-1.6), Point::repeat(1.6)),
        h,
    )
    .unwrap();
    for (f, rho) in [(&ball, 0.3), (&cube_field(h, 0.5), 0.25)] {
        let dv = (f.offset_volume(rho + h).unwrap() - f.offset_volume(rho - h).unwrap()) / (2.0 * h);
        let area = surface_area(&extract_level_set(f, rho).unwrap());
        assert!((dv - area).abs() < 0.02 * area, "{dv} vs {area}");
    }
}

#[test]
fn offset_of_offset() {
    let h = 0.1;
    let (a, b) = (0.3, 0.2);
    let ball = build_distance_field(
        &Body::unit_ball(Dim::Three),
        BBox::new(Point::repeat(-1.9), Point::repeat(1.9)),
        h,
    )
    .unwrap();
    let BoundaryMesh::Surface(inner) = extract_level_set(&ball, a).unwrap().mesh else {
        panic!("expected a surface");
    };
    let solid = Body::sampled(Dim::Three, SampledSet::Mesh(inner)).unwrap();
    let outer = build_distance_field(&solid, BBox::new(Point::repeat(-1.9), Point::repeat(1.9)), h).unwrap();
    let composed = outer.offset_volume(b).unwrap();
    let direct = ball.offset_volume(a + b).unwrap();
    let area = 4.0 * PI * (1.0 + a + b).powi(2);
    assert!((composed - direct).abs() < area * h, "{composed} vs {direct}");
}

#[test]
fn two_balls_fit_the_sum_of_their_polynomials() {
    let centers = [Vector3::new(-2.0, 0.0, 0.0), Vector3::new(2.0, 0.0, 0.0)];
    let body = Body::sampled(
        Dim::Three,
        SampledSet::Union(centers.iter().map(|c| Body::ball(Dim::Three, *c, 1.0).unwrap()).collect()),
    )
    .unwrap();
    let f = build_distance_field(&body, BBox::new(Point::new(-4.0, -2.0, -2.0), Point::new(4.0, 2.0, 2.0)), 0.04)
        .unwrap();
    for v in f.values.iter().step_by(97).enumerate() {
        let x = f.node_of_index(v.0 * 97);
        let want = centers.iter().map(|c| ((x - c).norm() - 1.0).max(0.0)).fold(f64::INFINITY, f64::min);
        assert!((v.1 - want).abs() < 1e-12);
    }
    let fit = steiner_fit(&f, &radii_range(0.1, 0.9, 8)).unwrap();
    assert_eq!(fit.reach_verdict, ReachVerdict::ConsistentWithReach, "{}", fit.residual);
    let exact = |r: f64| 2.0 * 4.0 * PI / 3.0 * (1.0 + r).powi(3);
    for r in [0.2, 0.5, 0.8] {
        assert!((fit.evaluate(r) - exact(r)).abs() < 0.01 * exact(r));
    }
    let s = extract_level_set(&f, 0.5).unwrap();
    let BoundaryMesh::Surface(m) = &s.mesh else { panic!() };
    assert_eq!(m.euler_characteristics(), vec![2, 2]);
}

#[test]
fn convex_residual_is_much_smaller_than_the_l_shape() {
    let h = 0.02;
    let cube = steiner_fit(&cube_field(h, 0.7), &radii_range(0.1, 0.6, 8)).unwrap();
    let l = build_distance_field(
        &Body::l_tromino(Dim::Two),
        BBox::new(Point::new(-3.2, -3.2, 0.0), Point::new(5.2, 5.2, 0.0)),
        h,
    )
    .unwrap();
    let lfit = steiner_fit(&l, &radii_range(0.25, 3.0, 12)).unwrap();
    assert_eq!(cube.reach_verdict, ReachVerdict::ConsistentWithReach);
    assert_eq!(lfit.reach_verdict, ReachVerdict::PolynomialityViolated);
    assert!(lfit.residual >= 10.0 * cube.residual, "{} vs {}", lfit.residual, cube.residual);
}

#[test]
fn l_shape_tube_volume_has_the_expected_kink() {
    // Below the reentrant scale the tube volume is 3 + 8ρ + (5π/4 − 1)ρ².
    let l = build_distance_field(
        &Body::l_tromino(Dim::Two),
        BBox::new(Point::new(-1.5, -1.5, 0.0), Point::new(3.5, 3.5, 0.0)),
        0.01,
    )
    .unwrap();
    for rho in [0.25, 0.5, 0.9] {
        let want = 3.0 + 8.0 * rho + (1.25 * PI - 1.0) * rho * rho;
        assert!((l.offset_volume(rho).unwrap() - want).abs() < 1e-3 * want);
    }
}

#[test]
fn level_sets_are_spheres_topologically() {
    let cap = build_distance_field(
        &Body::cap_body(Dim::Three, 0.5).unwrap(),
        BBox::new(Point::repeat(-1.4), Point::repeat(1.4)),
        0.04,
    )
    .unwrap();
    let s = extract_level_set(&cap, 0.2).unwrap();
    let BoundaryMesh::Surface(m) = &s.mesh else { panic!() };
    assert_eq!(m.euler_characteristics(), vec![2]);
    for n in &s.normals {
        assert!((n.norm() - 1.0).abs() < 1e-12);
    }
    let s = extract_level_set(&cube_field(0.04, 0.5), 0.3).unwrap();
    let BoundaryMesh::Surface(m) = &s.mesh else { panic!() };
    assert_eq!(m.euler_characteristics(), vec![2]);
}
