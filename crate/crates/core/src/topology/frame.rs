use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geom::{angle_between, rotation_matrix, RigidMotion, EPS_GEO, UNIT_TOL};

/// Angular distance of the last approach term to the singular point. Above
/// `EPS_GEO` so every term is evaluable.
const FINAL_GAP: f64 = 1.2e-9;
const CAUCHY_TOL: f64 = 1e-8;
const MIN_STEPS: usize = 8;

fn check_unit(v: &Vector3<f64>, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() <= UNIT_TOL {
        Ok(())
    } else {
        Err(invalid(format!("{what} is not a unit vector")))
    }
}

/// Minimal rotation taking `base` to `u`: about `base × u` by the angle
/// between them. Undefined at `u = −base`.
pub fn meridian_frame(u: &Vector3<f64>, base: &Vector3<f64>) -> Result<RigidMotion> {
    check_unit(u, "u")?;
    check_unit(base, "base")?;
    let to_antipode = angle_between(u, &-base);
    if to_antipode <= EPS_GEO {
        return Err(Error::Singularity { angle: to_antipode });
    }
    let axis = base.cross(u);
    let n = axis.norm();
    if n == 0.0 {
        return Ok(RigidMotion::identity());
    }
    let omega = rotation_matrix(&(axis / n), angle_between(base, u));
    RigidMotion::from_orthogonal(omega)
}

type Rule = dyn Fn(&Vector3<f64>) -> Result<RigidMotion> + Send + Sync;

/// Assignment `u ↦ Ω_u` of a linear isometry with `Ω_u·base = u`.
pub struct FrameField {
    base: Vector3<f64>,
    rule: Box<Rule>,
    singular_set: Vec<Vector3<f64>>,
}

impl fmt::Debug for FrameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrameField")
            .field("base", &self.base)
            .field("singular_set", &self.singular_set)
            .finish_non_exhaustive()
    }
}

impl FrameField {
    pub fn new(
        base: Vector3<f64>,
        rule: impl Fn(&Vector3<f64>) -> Result<RigidMotion> + Send + Sync + 'static,
        singular_set: Vec<Vector3<f64>>,
    ) -> Result<Self> {
        check_unit(&base, "base")?;
        Ok(Self {
            base,
            rule: Box::new(rule),
            singular_set,
        })
    }

    /// The minimal-rotation rule, singular only at `−base`.
    pub fn meridian(base: Vector3<f64>) -> Result<Self> {
        Self::new(base, move |u| meridian_frame(u, &base), vec![-base])
    }

    pub fn base(&self) -> &Vector3<f64> {
        &self.base
    }

    pub fn singular_set(&self) -> &[Vector3<f64>] {
        &self.singular_set
    }

    pub fn evaluate(&self, u: &Vector3<f64>) -> Result<RigidMotion> {
        (self.rule)(u)
    }
}

/// Limit of the frame along one meridian into the singular point.
#[derive(Debug, Clone, Serialize)]
pub struct MeridianLimit {
    pub longitude: f64,
    /// Frame at the last term.
    pub limit: RigidMotion,
    /// Largest Frobenius distance between the last three frames.
    pub cauchy_spread: f64,
    pub converged: bool,
    /// Angle between the last term and the singular point.
    pub final_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoSequenceLimits {
    pub steps: usize,
    pub first: MeridianLimit,
    pub second: MeridianLimit,
    /// `‖L₁⁻¹L₂ − I‖_F`.
    pub relative_distance: f64,
}

/// Unit vectors `(e₁, e₂)` with `e₁ × e₂ = base`; longitude 0 is the
/// direction of `x` projected off `base` (of `y` when `base` is along `x`).
fn longitude_frame(base: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut e1 = Vector3::x() - base * base.x;
    if e1.norm() < 1e-6 {
        e1 = Vector3::y() - base * base.y;
    }
    let e1 = e1.normalize();
    (e1, base.cross(&e1))
}

/// Angular gaps to the singular point: geometric from `π/2` and halving over
/// the last terms, ending at `FINAL_GAP`.
fn gaps(steps: usize) -> Vec<f64> {
    let ratio = (FINAL_GAP / FRAC_PI_2).powf(1.0 / (steps - 1) as f64);
    (0..steps)
        .map(|n| {
            let geometric = FRAC_PI_2 * ratio.powi(n as i32);
            let halving = FINAL_GAP * 2f64.powi((steps - 1 - n) as i32);
            geometric.min(halving)
        })
        .collect()
}

/// Frames along the meridian at `longitude`. The terms are built in the
/// frame `q = [e₁ e₂ base]`, where the offsets from `−e₃` are exact to
/// relative precision, and the minimal-rotation rule is carried over by
/// `Ω ↦ q Ω qᵀ`, which it commutes with.
fn meridian_limit(q: &Matrix3<f64>, longitude: f64, gaps: &[f64]) -> Result<MeridianLimit> {
    let e3 = Vector3::z();
    let frames = gaps
        .iter()
        .map(|&g| {
            let (s, c) = (std::f64::consts::PI - g).sin_cos();
            let u = Vector3::new(s * longitude.cos(), s * longitude.sin(), c);
            let local = meridian_frame(&u, &e3)?;
            RigidMotion::from_orthogonal(q * local.omega() * q.transpose())
        })
        .collect::<Result<Vec<_>>>()?;
    let last = *frames.last().expect("at least one step");
    let cauchy_spread = frames[frames.len() - 3..]
        .iter()
        .map(|f| (f.omega() - last.omega()).norm())
        .fold(0.0, f64::max);
    Ok(MeridianLimit {
        longitude,
        limit: last,
        cauchy_spread,
        converged: cauchy_spread <= CAUCHY_TOL,
        final_gap: *gaps.last().expect("at least one step"),
    })
}

/// Follows the meridian frame field along two meridians at longitudes
/// `phi1`, `phi2` into the singular point `−base` and returns both limits.
pub fn two_sequence_limits(
    base: &Vector3<f64>,
    phi1: f64,
    phi2: f64,
    steps: usize,
) -> Result<TwoSequenceLimits> {
    if steps < MIN_STEPS {
        return Err(invalid(format!(
            "{steps} steps cannot approach the singular point; need at least {MIN_STEPS}"
        )));
    }
    if !phi1.is_finite() || !phi2.is_finite() {
        return Err(invalid("non-finite longitude"));
    }
    check_unit(base, "base")?;
    let (e1, e2) = longitude_frame(base);
    let q = Matrix3::from_columns(&[e1, e2, *base]);
    let g = gaps(steps);
    let first = meridian_limit(&q, phi1, &g)?;
    let second = meridian_limit(&q, phi2, &g)?;
    let relative: Matrix3<f64> = first.limit.omega().transpose() * second.limit.omega();
    Ok(TwoSequenceLimits {
        steps,
        relative_distance: (relative - Matrix3::identity()).norm(),
        first,
        second,
    })
}
