//! Rotation axes and mirror planes of support cones, right-circularity, and
//! circle detection for planar sections.
//!
//! Every symmetry of a cone fixes its apex and its canonical axis `w`, so the
//! symmetry group is a subgroup of the `O(2)` acting about `w`: rotations
//! about the line through the apex along `w`, and reflections in planes
//! containing that line.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cone::{PlanarSection, SupportCone};
use crate::error::{invalid, Result};
use crate::geom::{angle_between, any_orthonormal, to_array, PlaneFrame, Point3, RigidMotion};

/// Finite orders tried on sampled cones.
const MAX_SAMPLED_ORDER: usize = 32;
/// Distinct verified orders beyond which a sampled cone counts as having a
/// continuous rotation group.
const INFINITE_ORDER_COUNT: usize = 16;
/// Azimuth steps when scanning mirror planes of sampled cones.
const PLANE_SCAN_STEPS: usize = 180;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOrder {
    Finite(usize),
    Infinite,
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupOrder::Finite(n) => write!(f, "{n}"),
            GroupOrder::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for GroupOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GroupOrder::Finite(n) => s.serialize_u64(*n as u64),
            GroupOrder::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for GroupOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|n| GroupOrder::Finite(n as usize))
                .ok_or_else(|| serde::de::Error::custom("group order must be a positive integer")),
            serde_json::Value::String(s) if s == "infinite" => Ok(GroupOrder::Infinite),
            other => Err(serde::de::Error::custom(format!(
                "invalid group order {other}"
            ))),
        }
    }
}

/// Rotation axis through `point` along `direction`, with its order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryAxis {
    #[serde(serialize_with = "ser_vec")]
    pub point: Point3,
    #[serde(serialize_with = "ser_vec")]
    pub direction: Vector3<f64>,
    pub order: GroupOrder,
}

fn ser_vec<S: Serializer>(v: &Vector3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_array(v).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub axes: Vec<SymmetryAxis>,
    pub planes: Vec<PlaneFrame>,
    pub is_right_circular: bool,
    pub half_angle: Option<f64>,
    pub group_order: GroupOrder,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    RightCircular,
    AxisOfSymmetry,
    PlaneOnlyFinite,
    Trivial,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::RightCircular => "right_circular",
            SymmetryClass::AxisOfSymmetry => "axis_of_symmetry",
            SymmetryClass::PlaneOnlyFinite => "plane_only_finite",
            SymmetryClass::Trivial => "trivial",
        })
    }
}

/// Default tolerance: 1e-6 for polyhedral cones, 1e-3 for sampled ones.
pub fn default_tol(c: &SupportCone) -> f64 {
    if c.is_sampled() {
        1e-3
    } else {
        1e-6
    }
}

/// Axis through the apex along the canonical axis, tilted by one
/// least-squares plane fit through the ray tips.
fn fitted_axis(c: &SupportCone) -> Vector3<f64> {
    let w = c.canonical_axis();
    let rays = c.rays();
    let n = rays.len() as f64;
    let mean: Vector3<f64> = rays.iter().sum::<Vector3<f64>>() / n;
    let cov: Matrix3<f64> = rays
        .iter()
        .map(|r| (r - mean) * (r - mean).transpose())
        .sum();
    let eig = cov.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let mut a = eig.eigenvectors.column(k).into_owned();
    // a degenerate fit (rays not spread around a cap) keeps the canonical axis
    let sorted = {
        let mut e = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        e.sort_by(f64::total_cmp);
        e
    };
    if !(sorted[1] > 1e-12 * sorted[2].max(1e-300)) || rays.len() < 3 {
        return w;
    }
    if a.dot(&w) < 0.0 {
        a = -a;
    }
    if a.dot(&w) < 0.5 {
        return w;
    }
    a.normalize()
}

/// Whether every ray, and the midpoint of every boundary arc, makes the same
/// angle with the fitted axis within `tol`. Returns the mean ray angle when
/// it does.
pub fn is_right_circular(c: &SupportCone, tol: f64) -> (bool, Option<f64>) {
    let axis = fitted_axis(c);
    let rays = c.rays();
    let angles: Vec<f64> = rays.iter().map(|r| angle_between(r, &axis)).collect();
    let mean = angles.iter().sum::<f64>() / angles.len() as f64;
    let n = rays.len();
    let mids = (0..n).map(|i| {
        let m = rays[i] + rays[(i + 1) % n];
        angle_between(&m, &axis)
    });
    let ok = angles
        .iter()
        .copied()
        .chain(mids)
        .all(|a| (a - mean).abs() <= tol);
    (ok, ok.then_some(mean))
}

/// Azimuth of `r` about `axis` in the frame `(e1, e2)`.
fn azimuth(r: &Vector3<f64>, e1: &Vector3<f64>, e2: &Vector3<f64>) -> f64 {
    r.dot(e2).atan2(r.dot(e1))
}

fn mirror(apex: &Point3, axis: &Vector3<f64>, normal: Vector3<f64>) -> Option<PlaneFrame> {
    PlaneFrame::new(*apex, normal.normalize(), *axis).ok()
}

fn residual(c: &SupportCone, phi: &RigidMotion) -> f64 {
    c.motion_image(phi).image_distance(c.rays(), c.is_sampled())
}

/// Rotation axes and mirror planes of `c` whose images match `c` within
/// `tol` on the spherical image.
pub fn detect_symmetries(c: &SupportCone, tol: f64) -> SymmetryReport {
    let apex = *c.apex();
    let (circular, half_angle) = is_right_circular(c, tol);
    if circular {
        return SymmetryReport {
            axes: vec![SymmetryAxis {
                point: apex,
                direction: fitted_axis(c),
                order: GroupOrder::Infinite,
            }],
            planes: Vec::new(),
            is_right_circular: true,
            half_angle,
            group_order: GroupOrder::Infinite,
            tol,
        };
    }
    let frame = |axis: Vector3<f64>| {
        let e1 = any_orthonormal(&axis);
        (axis, e1, axis.cross(&e1))
    };
    let (axis, rotations, planes) = if c.is_sampled() {
        // the canonical axis is intrinsic to the boundary curve; the plane
        // fit is a fallback for when it misses by more than the tolerance
        let mut best: Option<(usize, Vector3<f64>, RotationOrder, Vec<PlaneFrame>)> = None;
        for axis in [c.canonical_axis(), fitted_axis(c)] {
            let (axis, e1, e2) = frame(axis);
            let (rot, planes) = sampled_elements(c, &axis, &e1, &e2, tol);
            let size = match rot {
                RotationOrder::Continuous => usize::MAX,
                RotationOrder::Finite(n) => n + planes.len(),
            };
            if best.as_ref().is_none_or(|(s, ..)| size > *s) {
                best = Some((size, axis, rot, planes));
            }
        }
        let (_, axis, rot, planes) = best.expect("two candidate axes");
        (axis, rot, planes)
    } else {
        let (axis, e1, e2) = frame(c.canonical_axis());
        let (rot, planes) = polyhedral_elements(c, &axis, &e1, &e2, tol);
        (axis, rot, planes)
    };

    let (axes, group_order) = match rotations {
        RotationOrder::Finite(n) => {
            let axes = if n >= 2 {
                vec![SymmetryAxis {
                    point: apex,
                    direction: axis,
                    order: GroupOrder::Finite(n),
                }]
            } else {
                Vec::new()
            };
            (axes, GroupOrder::Finite(n + planes.len()))
        }
        RotationOrder::Continuous => (
            vec![SymmetryAxis {
                point: apex,
                direction: axis,
                order: GroupOrder::Infinite,
            }],
            GroupOrder::Infinite,
        ),
    };
    SymmetryReport {
        axes,
        planes,
        is_right_circular: false,
        half_angle: None,
        group_order,
        tol,
    }
}

enum RotationOrder {
    Finite(usize),
    Continuous,
}

/// Exhaustive over ray correspondences: a symmetry sends ray 0 to some ray
/// `j` at the same angle from the axis, which fixes the rotation angle, or
/// the mirror plane through the bisecting azimuth.
fn polyhedral_elements(
    c: &SupportCone,
    axis: &Vector3<f64>,
    e1: &Vector3<f64>,
    e2: &Vector3<f64>,
    tol: f64,
) -> (RotationOrder, Vec<PlaneFrame>) {
    let apex = c.apex();
    let rays = c.rays();
    let polar0 = angle_between(&rays[0], axis);
    let az0 = azimuth(&rays[0], e1, e2);
    let mut rotations = 1;
    let mut normals: Vec<f64> = Vec::new();
    let mut planes = Vec::new();
    for (j, r) in rays.iter().enumerate() {
        if (angle_between(r, axis) - polar0).abs() > 2.0 * tol {
            continue;
        }
        let az = azimuth(r, e1, e2);
        if j > 0 {
            let rot = RigidMotion::rotation_about_line(apex, axis, az - az0).expect("unit axis");
            if residual(c, &rot) <= tol {
                rotations += 1;
            }
        }
        // the mirror contains the axis and the bisecting direction
        let mid = 0.5 * (az0 + az);
        let normal_az = (mid + 0.5 * PI).rem_euclid(PI);
        if normals
            .iter()
            .any(|&n| angular_gap(n, normal_az, PI) < 1e-9)
        {
            continue;
        }
        let normal = e1 * normal_az.cos() + e2 * normal_az.sin();
        if let Some(frame) = mirror(apex, axis, normal) {
            if residual(c, &RigidMotion::reflection_in_plane(&frame)) <= tol {
                normals.push(normal_az);
                planes.push(frame);
            }
        }
    }
    (RotationOrder::Finite(rotations), planes)
}

fn angular_gap(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Sampled cones: test rotations by `2π/n` and scan mirror azimuths, since
/// samples need not sit at symmetric positions.
fn sampled_elements(
    c: &SupportCone,
    axis: &Vector3<f64>,
    e1: &Vector3<f64>,
    e2: &Vector3<f64>,
    tol: f64,
) -> (RotationOrder, Vec<PlaneFrame>) {
    let apex = c.apex();
    let verified: Vec<usize> = (2..=MAX_SAMPLED_ORDER)
        .filter(|&n| {
            let rot =
                RigidMotion::rotation_about_line(apex, axis, TAU / n as f64).expect("unit axis");
            residual(c, &rot) <= tol
        })
        .collect();
    let rotations = if verified.len() >= INFINITE_ORDER_COUNT {
        RotationOrder::Continuous
    } else {
        RotationOrder::Finite(verified.iter().copied().max().unwrap_or(1))
    };

    let plane_at = |az: f64| mirror(apex, axis, e1 * az.cos() + e2 * az.sin());
    let f = |az: f64| {
        plane_at(az)
            .map(|p| residual(c, &RigidMotion::reflection_in_plane(&p)))
            .unwrap_or(f64::INFINITY)
    };
    let step = PI / PLANE_SCAN_STEPS as f64;
    let values: Vec<f64> = (0..PLANE_SCAN_STEPS).map(|k| f(k as f64 * step)).collect();
    let mut planes = Vec::new();
    let mut found: Vec<f64> = Vec::new();
    for k in 0..PLANE_SCAN_STEPS {
        let prev = values[(k + PLANE_SCAN_STEPS - 1) % PLANE_SCAN_STEPS];
        let next = values[(k + 1) % PLANE_SCAN_STEPS];
        if !(values[k] <= prev && values[k] <= next) || values[k] > 20.0 * tol {
            continue;
        }
        let (az, v) = golden_min(&f, (k as f64 - 1.0) * step, (k as f64 + 1.0) * step, 40);
        let az = az.rem_euclid(PI);
        if v <= tol && !found.iter().any(|&g| angular_gap(g, az, PI) < 2.0 * step) {
            found.push(az);
            planes.extend(plane_at(az));
        }
    }
    (rotations, planes)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Which branch of the axis/plane case analysis a report falls in.
pub fn case_split(report: &SymmetryReport) -> SymmetryClass {
    if report.is_right_circular {
        SymmetryClass::RightCircular
    } else if !report.axes.is_empty() {
        SymmetryClass::AxisOfSymmetry
    } else if !report.planes.is_empty() {
        SymmetryClass::PlaneOnlyFinite
    } else {
        SymmetryClass::Trivial
    }
}

/// Circle fitted to a planar section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFit {
    pub is_circle: bool,
    /// Center in the section's 2D coordinates.
    #[serde(serialize_with = "ser_vec2")]
    pub center: Vector2<f64>,
    pub radius: f64,
    /// Largest deviation of a vertex distance from `radius`.
    pub max_deviation: f64,
}

fn ser_vec2<S: Serializer>(v: &Vector2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v.x, v.y].serialize(s)
}

/// Whether the section's vertices are equidistant, within `tol`, from the
/// center of a least-squares circle fit started at the vertex centroid.
pub fn detect_circle(section: &PlanarSection, tol: f64) -> Result<CircleFit> {
    let pts = section.polygon();
    if pts.len() < 8 {
        return Err(invalid(format!(
            "circle detection needs at least 8 vertices, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let centroid: Vector2<f64> = pts.iter().sum::<Vector2<f64>>() / n;
    // algebraic fit in coordinates relative to the centroid:
    // |p|² = 2 c·p + k
    let mut ata = nalgebra::Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for p in pts {
        let q = p - centroid;
        let row = Vector3::new(2.0 * q.x, 2.0 * q.y, 1.0);
        ata += row * row.transpose();
        atb += row * q.norm_squared();
    }
    let center = match ata.lu().solve(&atb) {
        Some(s) if s.iter().all(|v| v.is_finite()) => centroid + Vector2::new(s[0], s[1]),
        _ => centroid,
    };
    let radii: Vec<f64> = pts.iter().map(|p| (p - center).norm()).collect();
    let radius = radii.iter().sum::<f64>() / n;
    let max_deviation = radii.iter().map(|r| (r - radius).abs()).fold(0.0, f64::max);
    Ok(CircleFit {
        is_circle: max_deviation <= tol,
        center,
        radius,
        max_deviation,
    })
}

#[cfg(test)]
mod tests;
