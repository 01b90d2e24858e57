//! Foundational geometry: convex bodies, rigid motions, plane frames and
//! Hausdorff distances. Everything is `f64`.

mod body;
mod frame;
mod hausdorff;
pub mod hull;
mod motion;
pub mod off;

pub use body::{ConvexBody3, Ellipsoid, Facet, Polytope};
pub use frame::PlaneFrame;
pub use hausdorff::{
    directed_hausdorff, hausdorff_bounded, hausdorff_distance, vertex_curve_hausdorff,
};
pub use motion::RigidMotion;

use nalgebra::{Matrix3, Vector3};

/// Points and direction vectors share one representation.
pub type Point3 = Vector3<f64>;

/// Default tolerance for geometric predicates.
pub const EPS_GEO: f64 = 1e-9;

/// Entrywise tolerance on `ΩᵀΩ - I` for orthogonal parts.
pub const ORTHO_TOL: f64 = 1e-12;

/// Tolerance on `|det Ω| - 1`.
pub const DET_TOL: f64 = 1e-9;

/// Tolerance for unit-length checks.
pub const UNIT_TOL: f64 = 1e-12;

/// Apexes closer than this to the body boundary are rejected.
pub const APEX_MARGIN: f64 = 1e-6;

/// Number of consecutive compositions after which the orthogonal part is
/// re-projected onto O(3).
pub const REPROJECT_AFTER: u32 = 16;

/// Angle between two vectors, accurate near 0 and π.
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// A unit vector orthogonal to `v` (which must be nonzero). Deterministic.
pub fn any_orthonormal(v: &Vector3<f64>) -> Vector3<f64> {
    let a = v.abs();
    let helper = if a.x <= a.y && a.x <= a.z {
        Vector3::x()
    } else if a.y <= a.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&helper).normalize()
}

/// Rodrigues rotation matrix about a unit axis.
pub fn rotation_matrix(axis: &Vector3<f64>, theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    let k = axis.cross_matrix();
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// Matrix exponential of a rotation vector.
pub fn rotation_from_vector(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    if theta < 1e-300 {
        return Matrix3::identity();
    }
    rotation_matrix(&(w / theta), theta)
}

/// Nearest orthogonal matrix in Frobenius norm (polar factor).
pub fn polar_orthogonal(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

/// Largest entry of `|ΩᵀΩ - I|`.
pub fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).abs().max()
}

/// Fibonacci lattice of `n` unit vectors.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// The twelve vertices of a unit icosahedron, `(0, ±1, ±φ)` and cyclic
/// permutations, normalized.
pub fn icosahedron_vertices() -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            v.push(Vector3::new(0.0, a, b));
            v.push(Vector3::new(a, b, 0.0));
            v.push(Vector3::new(b, 0.0, a));
        }
    }
    v.into_iter().map(|x| x.normalize()).collect()
}

/// The 60 rotations of the icosahedral group.
pub fn icosahedral_rotations() -> Vec<Matrix3<f64>> {
    let verts = icosahedron_vertices();
    let frame = |a: &Vector3<f64>, b: &Vector3<f64>| {
        let e2 = (b - a * a.dot(b)).normalize();
        Matrix3::from_columns(&[*a, e2, a.cross(&e2)])
    };
    let v0 = verts[0];
    let edge = verts
        .iter()
        .map(|v| v.dot(&v0))
        .filter(|d| *d < 0.999)
        .fold(f64::NEG_INFINITY, f64::max);
    let v1 = *verts
        .iter()
        .find(|v| (v.dot(&v0) - edge).abs() < 1e-9)
        .unwrap();
    let base = frame(&v0, &v1).transpose();
    let mut out = Vec::with_capacity(60);
    for a in &verts {
        for b in &verts {
            if (a.dot(b) - edge).abs() < 1e-9 {
                out.push(frame(a, b) * base);
            }
        }
    }
    out
}

pub(crate) fn to_array(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub(crate) fn matrix_rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

pub(crate) fn matrix_from_rows(r: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::new(
        r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
    )
}
