//! Helpers shared by unit tests.

use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use crate::geom::{rotation_from_vector, ConvexBody3, Point3, RigidMotion};

pub fn motion(rv: [f64; 3], t: [f64; 3], reflect: bool) -> RigidMotion {
    let mut omega = rotation_from_vector(&Vector3::from(rv));
    if reflect {
        omega *= Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
    }
    RigidMotion::new(omega, Vector3::from(t)).unwrap()
}

pub fn arb_motion() -> impl Strategy<Value = RigidMotion> {
    (
        prop::array::uniform3(-3.0f64..3.0),
        prop::array::uniform3(-5.0f64..5.0),
        any::<bool>(),
    )
        .prop_map(|(rv, t, r)| motion(rv, t, r))
}

pub fn cube(h: f64) -> ConvexBody3 {
    let mut v = Vec::new();
    for &x in &[-h, h] {
        for &y in &[-h, h] {
            for &z in &[-h, h] {
                v.push(Point3::new(x, y, z));
            }
        }
    }
    ConvexBody3::polytope(&v).unwrap()
}

/// Random polytope: points scattered in a unit-ish cloud (always full rank
/// because of the fixed tetrahedron).
pub fn arb_polytope() -> impl Strategy<Value = ConvexBody3> {
    prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), 0..12).prop_map(|pts| {
        let mut v: Vec<Point3> = vec![
            Point3::new(0.9, 0.0, -0.5),
            Point3::new(-0.5, 0.8, -0.5),
            Point3::new(-0.5, -0.8, -0.5),
            Point3::new(0.0, 0.0, 0.9),
        ];
        v.extend(pts.into_iter().map(Point3::from));
        ConvexBody3::polytope(&v).unwrap()
    })
}

pub fn arb_apex() -> impl Strategy<Value = Point3> {
    (prop::array::uniform3(-1.0f64..1.0), 2.5f64..6.0).prop_filter_map("zero", |(d, r)| {
        let d = Vector3::from(d);
        (d.norm() > 0.1).then(|| d.normalize() * r)
    })
}

pub fn arb_cone() -> impl Strategy<Value = crate::cone::SupportCone> {
    (arb_polytope(), arb_apex())
        .prop_map(|(body, x)| crate::cone::support_cone(&body, &x, 0).unwrap())
}
