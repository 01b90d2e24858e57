use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use super::{any_orthonormal, to_array, Point3, RigidMotion, UNIT_TOL};
use crate::error::{invalid, Result};

/// An oriented plane with a right-handed orthonormal frame
/// `(basis_u, basis_v, normal)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    origin: Point3,
    normal: Vector3<f64>,
    basis_u: Vector3<f64>,
    basis_v: Vector3<f64>,
}

impl PlaneFrame {
    /// `basis_u` is orthogonalised against `normal`; `basis_v = normal × basis_u`.
    pub fn new(origin: Point3, normal: Vector3<f64>, basis_u: Vector3<f64>) -> Result<Self> {
        if !((normal.norm() - 1.0).abs() <= UNIT_TOL) {
            return Err(invalid(format!("plane normal has norm {}", normal.norm())));
        }
        let u = basis_u - normal * normal.dot(&basis_u);
        if u.norm() < 1e-12 {
            return Err(invalid("basis_u parallel to normal"));
        }
        let u = u.normalize();
        Ok(Self {
            origin,
            normal,
            basis_u: u,
            basis_v: normal.cross(&u),
        })
    }

    pub fn from_normal(origin: Point3, normal: Vector3<f64>) -> Result<Self> {
        Self::new(origin, normal, any_orthonormal(&normal))
    }

    pub fn origin(&self) -> &Point3 {
        &self.origin
    }

    pub fn normal(&self) -> &Vector3<f64> {
        &self.normal
    }

    pub fn basis_u(&self) -> &Vector3<f64> {
        &self.basis_u
    }

    pub fn basis_v(&self) -> &Vector3<f64> {
        &self.basis_v
    }

    pub fn signed_distance(&self, p: &Point3) -> f64 {
        self.normal.dot(&(p - self.origin))
    }

    pub fn to_local(&self, p: &Point3) -> Vector2<f64> {
        let d = p - self.origin;
        Vector2::new(d.dot(&self.basis_u), d.dot(&self.basis_v))
    }

    pub fn to_world(&self, q: &Vector2<f64>) -> Point3 {
        self.origin + self.basis_u * q.x + self.basis_v * q.y
    }

    /// Image of the frame under `phi`. Returns the new frame and whether the
    /// in-plane orientation flipped (improper motions); a flipped frame maps
    /// local `(x, y)` to `(x, -y)`.
    pub fn transformed(&self, phi: &RigidMotion) -> (PlaneFrame, bool) {
        let normal = phi.apply_vector(&self.normal);
        let u = phi.apply_vector(&self.basis_u);
        let frame = PlaneFrame {
            origin: phi.apply(&self.origin),
            normal,
            basis_u: u,
            basis_v: normal.cross(&u),
        };
        (frame, !phi.is_proper())
    }
}

#[derive(Serialize)]
struct FrameRepr {
    origin: [f64; 3],
    normal: [f64; 3],
    basis_u: [f64; 3],
    basis_v: [f64; 3],
}

impl Serialize for PlaneFrame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameRepr {
            origin: to_array(&self.origin),
            normal: to_array(&self.normal),
            basis_u: to_array(&self.basis_u),
            basis_v: to_array(&self.basis_v),
        }
        .serialize(s)
    }
}
