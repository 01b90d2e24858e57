use std::f64::consts::{FRAC_PI_6, TAU};

use nalgebra::{Matrix3, Vector2, Vector3};
use proptest::prelude::*;

use super::*;
use crate::cone::{support_cone, PlanarSection, DEFAULT_SAMPLES};
use crate::congruence::procrustes_orthogonal;
use crate::geom::{ConvexBody3, PlaneFrame, Point3};
use crate::testutil::{arb_cone, arb_motion, cube};

fn circular_rays(axis: Vector3<f64>, alpha: f64, m: usize, phase: f64) -> Vec<Vector3<f64>> {
    let axis = axis.normalize();
    let e1 = any_orthonormal(&axis);
    let e2 = axis.cross(&e1);
    (0..m)
        .map(|k| {
            let t = phase + TAU * k as f64 / m as f64;
            axis * alpha.cos() + (e1 * t.cos() + e2 * t.sin()) * alpha.sin()
        })
        .collect()
}

fn regular_cone(m: usize) -> SupportCone {
    let rays = circular_rays(Vector3::new(0.2, -0.3, -1.0), 0.5, m, 0.3);
    SupportCone::from_rays(Point3::new(1.0, 2.0, 3.0), &rays, false).unwrap()
}

fn cube_cone() -> SupportCone {
    support_cone(&cube(1.0), &Point3::new(0.0, 0.0, 5.0), 0).unwrap()
}

/// Every orthogonal map sending the first two rays onto some ordered pair of
/// rays at the same angle, kept when it maps the cone onto itself.
fn brute_force_order(c: &SupportCone, tol: f64) -> usize {
    let rays = c.rays();
    let (r0, r1) = (rays[0], rays[1]);
    let angle = angle_between(&r0, &r1);
    let mut found: Vec<Matrix3<f64>> = Vec::new();
    for (k, rk) in rays.iter().enumerate() {
        for (l, rl) in rays.iter().enumerate() {
            if k == l || (angle_between(rk, rl) - angle).abs() > 1e-6 {
                continue;
            }
            for s in [1.0, -1.0] {
                let src = [r0, r1, r0.cross(&r1)];
                let dst = [*rk, *rl, rk.cross(rl) * s];
                let omega = *procrustes_orthogonal(&src, &dst).unwrap().omega();
                let phi = RigidMotion::new(omega, c.apex() - omega * c.apex()).unwrap();
                if residual(c, &phi) <= tol && !found.iter().any(|f| (f - omega).norm() < 1e-6) {
                    found.push(omega);
                }
            }
        }
    }
    found.len()
}

fn assert_sound(c: &SupportCone, r: &SymmetryReport) {
    for a in &r.axes {
        if let GroupOrder::Finite(n) = a.order {
            let rot =
                RigidMotion::rotation_about_line(&a.point, &a.direction, TAU / n as f64).unwrap();
            assert!(residual(c, &rot) <= r.tol);
        }
    }
    for p in &r.planes {
        assert!(residual(c, &RigidMotion::reflection_in_plane(p)) <= r.tol);
    }
}

#[test]
fn cube_cone_has_four_fold_axis_and_four_mirrors() {
    let c = cube_cone();
    let r = detect_symmetries(&c, 1e-6);
    assert_eq!(r.axes.len(), 1);
    assert_eq!(r.axes[0].order, GroupOrder::Finite(4));
    assert!((r.axes[0].direction - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-12);
    assert!((r.axes[0].point - Point3::new(0.0, 0.0, 5.0)).norm() < 1e-12);
    assert_eq!(r.planes.len(), 4);
    assert_eq!(r.group_order, GroupOrder::Finite(8));
    assert!(!r.is_right_circular);
    assert_eq!(case_split(&r), SymmetryClass::AxisOfSymmetry);
    assert_eq!(brute_force_order(&c, 1e-6), 8);
    assert_sound(&c, &r);
}

#[test]
fn scalene_cone_is_trivial() {
    let rays = [
        Vector3::new(1.0, 0.0, -2.0),
        Vector3::new(-1.0, 0.3, -2.0),
        Vector3::new(0.2, 1.0, -2.0),
    ];
    let c = SupportCone::from_rays(Point3::zeros(), &rays, false).unwrap();
    let r = detect_symmetries(&c, 1e-6);
    assert!(r.axes.is_empty() && r.planes.is_empty());
    assert_eq!(r.group_order, GroupOrder::Finite(1));
    assert_eq!(brute_force_order(&c, 1e-6), 1);
    assert_eq!(case_split(&r), SymmetryClass::Trivial);
}

#[test]
fn isosceles_cone_has_a_single_mirror() {
    let rays = [
        Vector3::new(1.0, 0.0, -2.0),
        Vector3::new(-1.0, 0.0, -2.0),
        Vector3::new(0.0, 1.5, -2.0),
    ];
    let c = SupportCone::from_rays(Point3::zeros(), &rays, false).unwrap();
    let r = detect_symmetries(&c, 1e-6);
    assert!(r.axes.is_empty());
    assert_eq!(r.planes.len(), 1);
    assert!(r.planes[0].normal().x.abs() > 1.0 - 1e-12);
    assert_eq!(r.group_order, GroupOrder::Finite(2));
    assert_eq!(brute_force_order(&c, 1e-6), 2);
    assert_eq!(case_split(&r), SymmetryClass::PlaneOnlyFinite);
}

#[test]
fn regular_polygon_cones_have_full_dihedral_group() {
    for m in 3..=8 {
        let c = regular_cone(m);
        let r = detect_symmetries(&c, 1e-6);
        assert_eq!(r.axes.len(), 1, "m = {m}");
        assert_eq!(r.axes[0].order, GroupOrder::Finite(m));
        assert_eq!(r.planes.len(), m);
        assert_eq!(r.group_order, GroupOrder::Finite(2 * m));
        assert_eq!(brute_force_order(&c, 1e-6), 2 * m);
        assert_sound(&c, &r);
    }
}

#[test]
fn right_circular_cone_reports_its_half_angle() {
    let rays = circular_rays(Vector3::new(0.0, 0.0, -1.0), FRAC_PI_6, 360, 0.0);
    let c = SupportCone::from_rays(Point3::zeros(), &rays, true).unwrap();
    let r = detect_symmetries(&c, 1e-3);
    assert!(r.is_right_circular);
    assert!((r.half_angle.unwrap() - FRAC_PI_6).abs() < 1e-9);
    assert_eq!(r.group_order, GroupOrder::Infinite);
    assert_eq!(case_split(&r), SymmetryClass::RightCircular);
}

#[test]
fn ball_cone_is_right_circular() {
    let ball = ConvexBody3::ball(Point3::zeros(), 1.0).unwrap();
    let c = support_cone(&ball, &Point3::new(0.0, 3.0, 0.0), DEFAULT_SAMPLES).unwrap();
    let (ok, half) = is_right_circular(&c, 1e-3);
    assert!(ok);
    assert!((half.unwrap() - (1.0f64 / 3.0).asin()).abs() < 1e-9);
    assert_eq!(
        case_split(&detect_symmetries(&c, 1e-3)),
        SymmetryClass::RightCircular
    );
}

#[test]
fn cube_cone_is_not_right_circular() {
    assert!(!is_right_circular(&cube_cone(), 1e-6).0);
    // the corners alone sit on a circle; the edges between them do not
    assert!(!is_right_circular(&cube_cone(), 1e-3).0);
}

/// Spread of ray angles about a known axis.
fn spread(c: &SupportCone, axis: &Vector3<f64>) -> f64 {
    let a: Vec<f64> = c.rays().iter().map(|r| angle_between(r, axis)).collect();
    a.iter().copied().fold(f64::MIN, f64::max) - a.iter().copied().fold(f64::MAX, f64::min)
}

#[test]
fn ellipsoid_cone_is_circular_only_along_its_long_axis() {
    let body = ConvexBody3::ellipsoid(
        Point3::zeros(),
        Vector3::new(2.0, 1.0, 1.0),
        Matrix3::identity(),
    )
    .unwrap();
    let along = support_cone(&body, &Point3::new(5.0, 0.0, 0.0), DEFAULT_SAMPLES).unwrap();
    assert!(spread(&along, &-Vector3::x()) < 1e-12);
    assert!(is_right_circular(&along, 1e-3).0);

    let across = support_cone(&body, &Point3::new(0.0, 5.0, 0.0), DEFAULT_SAMPLES).unwrap();
    assert!(spread(&across, &-Vector3::y()) > 0.1);
    assert!(!is_right_circular(&across, 1e-3).0);
    let r = detect_symmetries(&across, 1e-3);
    assert_eq!(r.axes.len(), 1);
    assert_eq!(r.axes[0].order, GroupOrder::Finite(2));
    assert_eq!(r.planes.len(), 2);
    assert_eq!(r.group_order, GroupOrder::Finite(4));
    assert_sound(&across, &r);
}

fn section(points: Vec<Vector2<f64>>) -> PlanarSection {
    let frame = PlaneFrame::from_normal(Point3::zeros(), Vector3::z()).unwrap();
    PlanarSection::new(frame, points)
}

fn polygon(m: usize, a: f64, b: f64) -> Vec<Vector2<f64>> {
    (0..m)
        .map(|k| {
            let t = TAU * k as f64 / m as f64;
            Vector2::new(0.4 + a * t.cos(), -0.7 + b * t.sin())
        })
        .collect()
}

#[test]
fn regular_polygon_is_a_circle() {
    let r = 1.0 / 3f64.sqrt();
    let fit = detect_circle(&section(polygon(64, r, r)), 1e-9).unwrap();
    assert!(fit.is_circle);
    assert!((fit.radius - r).abs() < 1e-9);
    assert!((fit.center - Vector2::new(0.4, -0.7)).norm() < 1e-12);
}

#[test]
fn square_is_not_a_circle() {
    let pts: Vec<_> = polygon(8, 1.0, 1.0)
        .into_iter()
        .map(|p| {
            let q = p - Vector2::new(0.4, -0.7);
            q / q.x.abs().max(q.y.abs())
        })
        .collect();
    let fit = detect_circle(&section(pts), 1e-3).unwrap();
    assert!(!fit.is_circle);
}

#[test]
fn slight_ellipse_is_not_a_circle() {
    let fit = detect_circle(&section(polygon(256, 1.01, 1.0)), 1e-3).unwrap();
    assert!(!fit.is_circle);
    // radial deviation is about half the gap between the semi-axes
    assert!(
        (fit.max_deviation - 0.005).abs() < 5e-4,
        "{}",
        fit.max_deviation
    );
}

#[test]
fn too_few_vertices_is_an_error() {
    assert!(detect_circle(&section(polygon(7, 1.0, 1.0)), 1e-3).is_err());
}

#[test]
fn report_serializes_orders() {
    let r = detect_symmetries(&cube_cone(), 1e-6);
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["group_order"], 8);
    assert_eq!(v["axes"][0]["order"], 4);
    assert_eq!(v["planes"].as_array().unwrap().len(), 4);
    let ball = ConvexBody3::ball(Point3::zeros(), 1.0).unwrap();
    let c = support_cone(&ball, &Point3::new(3.0, 0.0, 0.0), DEFAULT_SAMPLES).unwrap();
    let v = serde_json::to_value(detect_symmetries(&c, 1e-3)).unwrap();
    assert_eq!(v["group_order"], "infinite");
    let back: GroupOrder = serde_json::from_value(v["group_order"].clone()).unwrap();
    assert_eq!(back, GroupOrder::Infinite);
    assert_eq!(
        serde_json::to_value(SymmetryClass::PlaneOnlyFinite).unwrap(),
        "plane_only_finite"
    );
}

fn same_lines(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().all(|u| {
            b.iter()
                .any(|v| u.cross(v).norm() < 1e-6 && u.dot(v).abs() > 0.5)
        })
}

fn arb_symmetric_cone() -> impl Strategy<Value = SupportCone> {
    prop_oneof![
        arb_cone(),
        (3usize..=8).prop_map(regular_cone),
        Just(cube_cone()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detection_matches_brute_force(c in arb_symmetric_cone()) {
        let r = detect_symmetries(&c, 1e-6);
        assert_sound(&c, &r);
        prop_assert_eq!(r.group_order, GroupOrder::Finite(brute_force_order(&c, 1e-6)));
    }

    #[test]
    fn detection_is_equivariant(c in arb_symmetric_cone(), phi in arb_motion()) {
        let moved = c.motion_image(&phi);
        let r = detect_symmetries(&c, 1e-6);
        let s = detect_symmetries(&moved, 1e-6);
        prop_assert_eq!(r.group_order, s.group_order);
        let image = |v: &Vector3<f64>| phi.apply_vector(v);
        let axes: Vec<_> = r.axes.iter().map(|a| image(&a.direction)).collect();
        let axes2: Vec<_> = s.axes.iter().map(|a| a.direction).collect();
        prop_assert!(same_lines(&axes, &axes2));
        let normals: Vec<_> = r.planes.iter().map(|p| image(p.normal())).collect();
        let normals2: Vec<_> = s.planes.iter().map(|p| *p.normal()).collect();
        prop_assert!(same_lines(&normals, &normals2));
        for a in &s.axes {
            prop_assert!((a.point - moved.apex()).norm() < 1e-9);
        }
    }

    #[test]
    fn right_circularity_is_motion_invariant(m in 3usize..64, phi in arb_motion(), alpha in 0.1f64..1.2) {
        let rays = circular_rays(Vector3::new(0.3, 0.1, -1.0), alpha, m, 0.0);
        let c = SupportCone::from_rays(Point3::zeros(), &rays, true).unwrap();
        let (a, ha) = is_right_circular(&c, 1e-3);
        let (b, hb) = is_right_circular(&c.motion_image(&phi), 1e-3);
        prop_assert_eq!(a, b);
        if let (Some(x), Some(y)) = (ha, hb) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn elliptic_cone_from_a_generic_apex_has_its_two_mirrors() {
    let body = ConvexBody3::ellipsoid(
        Point3::zeros(),
        Vector3::new(2.0, 1.0, 1.0),
        Matrix3::identity(),
    )
    .unwrap();
    for x in [
        Vector3::new(3.0, 3.0, 2.0),
        Vector3::new(-1.0, 4.0, -2.5),
        Vector3::new(4.5, 0.3, 1.0),
    ] {
        let x = x.normalize() * 5.0;
        let c = support_cone(&body, &x, DEFAULT_SAMPLES).unwrap();
        let r = detect_symmetries(&c, 1e-3);
        assert_eq!(r.group_order, GroupOrder::Finite(4), "{x:?}");
        assert_eq!(case_split(&r), SymmetryClass::AxisOfSymmetry);
        assert_sound(&c, &r);
    }
}
