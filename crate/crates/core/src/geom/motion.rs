use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{
    matrix_from_rows, matrix_rows, orthogonality_defect, polar_orthogonal, rotation_matrix,
    to_array, PlaneFrame, Point3, DET_TOL, ORTHO_TOL, REPROJECT_AFTER, UNIT_TOL,
};
use crate::error::{invalid, Result};

/// An isometry `p ↦ a + Ω·p` with `Ω ∈ O(3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    omega: Matrix3<f64>,
    a: Vector3<f64>,
    // compositions since the last re-projection onto O(3)
    chain: u32,
}

impl RigidMotion {
    /// Validates `ΩᵀΩ = I` (entrywise 1e-12) and `|det Ω| = 1` (1e-9).
    pub fn new(omega: Matrix3<f64>, a: Vector3<f64>) -> Result<Self> {
        let defect = orthogonality_defect(&omega);
        if !(defect <= ORTHO_TOL) {
            return Err(invalid(format!("orthogonal part defect {defect:.3e}")));
        }
        let det = omega.determinant();
        if !((det.abs() - 1.0).abs() <= DET_TOL) {
            return Err(invalid(format!("orthogonal part has det {det}")));
        }
        if !a.iter().all(|x| x.is_finite()) {
            return Err(invalid("non-finite translation"));
        }
        Ok(Self { omega, a, chain: 0 })
    }

    /// Wraps a matrix already known to be orthogonal to working precision.
    pub(crate) fn from_parts(omega: Matrix3<f64>, a: Vector3<f64>) -> Self {
        Self { omega, a, chain: 0 }
    }

    pub fn identity() -> Self {
        Self::from_parts(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_orthogonal(omega: Matrix3<f64>) -> Result<Self> {
        Self::new(omega, Vector3::zeros())
    }

    pub fn translation(a: Vector3<f64>) -> Self {
        Self::from_parts(Matrix3::identity(), a)
    }

    pub fn omega(&self) -> &Matrix3<f64> {
        &self.omega
    }

    pub fn translation_part(&self) -> &Vector3<f64> {
        &self.a
    }

    pub fn det(&self) -> f64 {
        self.omega.determinant()
    }

    pub fn is_proper(&self) -> bool {
        self.det() > 0.0
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        self.a + self.omega * p
    }

    /// Action on direction vectors (translation ignored).
    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.omega * v
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        let mut omega = self.omega * other.omega;
        let mut chain = self.chain.max(other.chain) + 1;
        if chain > REPROJECT_AFTER {
            omega = polar_orthogonal(&omega);
            chain = 0;
        }
        RigidMotion {
            omega,
            a: self.a + self.omega * other.a,
            chain,
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        let t = self.omega.transpose();
        RigidMotion {
            omega: t,
            a: -(t * self.a),
            chain: self.chain,
        }
    }

    /// Rotation by `theta` about the line through `point` with unit `direction`.
    pub fn rotation_about_line(
        point: &Point3,
        direction: &Vector3<f64>,
        theta: f64,
    ) -> Result<RigidMotion> {
        if !((direction.norm() - 1.0).abs() <= UNIT_TOL) {
            return Err(invalid(format!(
                "axis direction has norm {}",
                direction.norm()
            )));
        }
        if !theta.is_finite() {
            return Err(invalid("non-finite angle"));
        }
        let omega = rotation_matrix(direction, theta);
        Ok(Self::from_parts(omega, point - omega * point))
    }

    /// Reflection in the plane of `frame`.
    pub fn reflection_in_plane(frame: &PlaneFrame) -> RigidMotion {
        let n = frame.normal();
        let omega = Matrix3::identity() - 2.0 * n * n.transpose();
        let o = frame.origin();
        Self::from_parts(omega, o - omega * o)
    }

    /// Frobenius distance between the orthogonal parts.
    pub fn omega_distance(&self, other: &RigidMotion) -> f64 {
        (self.omega - other.omega).norm()
    }

    /// Largest displacement `|Φp - p|` over the given points.
    pub fn max_displacement(&self, other: &RigidMotion, points: &[Point3]) -> f64 {
        points
            .iter()
            .map(|p| (self.apply(p) - other.apply(p)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct MotionRepr {
    omega: [[f64; 3]; 3],
    a: [f64; 3],
}

impl Serialize for RigidMotion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MotionRepr {
            omega: matrix_rows(&self.omega),
            a: to_array(&self.a),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RigidMotion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MotionRepr::deserialize(d)?;
        RigidMotion::new(matrix_from_rows(&r.omega), Vector3::from(r.a))
            .map_err(serde::de::Error::custom)
    }
}
