#![allow(dead_code)]

pub mod oracle;

use nalgebra::Vector3;
use supcone::cone::{support_cone, DEFAULT_SAMPLES};
use supcone::{ConvexBody3, Point3, SupportCone};

pub fn ellipsoid_211() -> ConvexBody3 {
    ConvexBody3::ellipsoid(
        Point3::zeros(),
        Vector3::new(2.0, 1.0, 1.0),
        nalgebra::Matrix3::identity(),
    )
    .unwrap()
}

/// Cones of the (2,1,1) ellipsoid from (5,0,0) and (0,5,0).
pub fn ellipsoid_pair() -> (SupportCone, SupportCone) {
    let body = ellipsoid_211();
    (
        support_cone(&body, &Point3::new(5.0, 0.0, 0.0), DEFAULT_SAMPLES).unwrap(),
        support_cone(&body, &Point3::new(0.0, 5.0, 0.0), DEFAULT_SAMPLES).unwrap(),
    )
}

/// Lower bound on the congruence distance of [`ellipsoid_pair`], from
/// `oracle::grid_lower_bound` over 2562 geodesic axes × 1° × both
/// determinant signs. Frozen; `tests/oracle.rs` recomputes it.
pub const DELTA_STAR: f64 = 4.805_022_420_895_270_5e-2;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use supcone::RigidMotion;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Cone of a random polytope (a fixed tetrahedron plus up to 12 random
/// points in the unit cube) from a random apex at distance 2.5 to 6.
pub fn random_cone(rng: &mut ChaCha8Rng) -> SupportCone {
    let mut v = vec![
        Point3::new(0.9, 0.0, -0.5),
        Point3::new(-0.5, 0.8, -0.5),
        Point3::new(-0.5, -0.8, -0.5),
        Point3::new(0.0, 0.0, 0.9),
    ];
    let extra = rng.random_range(0..=12);
    for _ in 0..extra {
        v.push(Point3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
    }
    let body = ConvexBody3::polytope(&v).unwrap();
    let dir = Vector3::new(normal(rng), normal(rng), normal(rng)).normalize();
    let apex = dir * rng.random_range(2.5..6.0);
    support_cone(&body, &apex, 0).unwrap()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let q = UnitQuaternion::from_quaternion(Quaternion::new(
        normal(rng),
        normal(rng),
        normal(rng),
        normal(rng),
    ));
    let r = q.to_rotation_matrix().into_inner();
    if rng.random_bool(0.5) {
        r * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))
    } else {
        r
    }
}

pub fn random_motion(rng: &mut ChaCha8Rng) -> RigidMotion {
    let omega = random_orthogonal(rng);
    let a = Vector3::new(normal(rng), normal(rng), normal(rng)) * 3.0;
    RigidMotion::new(omega, a).unwrap()
}
