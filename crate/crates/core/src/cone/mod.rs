//! Support cones `S_x = {x + λ(y − x) : y ∈ M, λ ≥ 0}` represented by their
//! spherical image, plus planar cross-sections.

mod section;

pub use section::PlanarSection;

use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geom::hull::convex_hull_2d;
use crate::geom::{
    angle_between, any_orthonormal, hausdorff_bounded, to_array, vertex_curve_hausdorff,
    ConvexBody3, PlaneFrame, Point3, RigidMotion, APEX_MARGIN, EPS_GEO, UNIT_TOL,
};

/// Boundary samples per cone for smooth bodies.
pub const DEFAULT_SAMPLES: usize = 256;

/// A salient polyhedral cone given by its apex and cyclically ordered
/// extreme rays (unit vectors). Rays run counterclockwise about the cone
/// interior: `det[w, rᵢ, rᵢ₊₁] > 0` for any interior direction `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCone {
    apex: Point3,
    rays: Vec<Vector3<f64>>,
    is_sampled: bool,
    source_samples: usize,
}

impl SupportCone {
    /// Cone over arbitrary nonzero directions; keeps only the extreme rays.
    pub fn from_rays(apex: Point3, directions: &[Vector3<f64>], is_sampled: bool) -> Result<Self> {
        let dirs: Vec<Vector3<f64>> = directions
            .iter()
            .map(|d| {
                let n = d.norm();
                if n > 0.0 && n.is_finite() {
                    Ok(d / n)
                } else {
                    Err(invalid("zero or non-finite ray"))
                }
            })
            .collect::<Result<_>>()?;
        let w = separating_direction(&dirs)
            .ok_or_else(|| invalid("rays do not span a salient cone"))?;
        Self::with_interior_direction(apex, &dirs, &w, is_sampled, directions.len())
    }

    fn with_interior_direction(
        apex: Point3,
        dirs: &[Vector3<f64>],
        w: &Vector3<f64>,
        is_sampled: bool,
        source_samples: usize,
    ) -> Result<Self> {
        let rays = extreme_rays(dirs, w)?;
        Ok(Self {
            apex,
            rays,
            is_sampled,
            source_samples,
        })
    }

    pub fn apex(&self) -> &Point3 {
        &self.apex
    }

    pub fn rays(&self) -> &[Vector3<f64>] {
        &self.rays
    }

    pub fn is_sampled(&self) -> bool {
        self.is_sampled
    }

    pub fn source_samples(&self) -> usize {
        self.source_samples
    }

    /// Normalized centroid of the boundary of the spherical image, weighted
    /// by arc length. A great arc from `a` to `b` subtending `θ` contributes
    /// `tan(θ/2)·(a + b)`.
    pub fn canonical_axis(&self) -> Vector3<f64> {
        let n = self.rays.len();
        let mut acc = Vector3::zeros();
        for i in 0..n {
            let a = &self.rays[i];
            let b = &self.rays[(i + 1) % n];
            let theta = angle_between(a, b);
            acc += (a + b) * (theta / 2.0).tan();
        }
        acc.normalize()
    }

    /// Whether `p` lies in the cone, up to `eps` on each facet.
    pub fn contains(&self, p: &Point3, eps: f64) -> bool {
        let d = p - self.apex;
        let len = d.norm();
        if len == 0.0 {
            return true;
        }
        let d = d / len;
        let n = self.rays.len();
        (0..n).all(|i| {
            let normal = self.rays[i].cross(&self.rays[(i + 1) % n]).normalize();
            normal.dot(&d) >= -eps
        })
    }

    /// Section by the plane perpendicular to the canonical axis at `distance`
    /// from the apex. The frame normal points back toward the apex and the
    /// frame origin is the foot of the axis.
    pub fn cross_section(&self, distance: f64) -> Result<PlanarSection> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(invalid(format!("section distance {distance}")));
        }
        let w = self.canonical_axis();
        let r0 = self.rays[0] - w * w.dot(&self.rays[0]);
        let u = if r0.norm() > 1e-12 {
            r0
        } else {
            any_orthonormal(&w)
        };
        let frame = PlaneFrame::new(self.apex + w * distance, -w, u)?;
        let polygon: Vec<Vector2<f64>> = self
            .rays
            .iter()
            .map(|r| frame.to_local(&(self.apex + r * (distance / r.dot(&w)))))
            .collect();
        Ok(PlanarSection::new(frame, polygon))
    }

    /// `Φ(C)`: apex mapped by `phi`, rays by its orthogonal part. Ray order is
    /// reversed (keeping the first ray) for improper motions so the
    /// orientation convention survives.
    pub fn motion_image(&self, phi: &RigidMotion) -> SupportCone {
        let mut rays: Vec<Vector3<f64>> = self.rays.iter().map(|r| phi.apply_vector(r)).collect();
        if !phi.is_proper() {
            rays[1..].reverse();
        }
        SupportCone {
            apex: phi.apply(&self.apex),
            rays,
            is_sampled: self.is_sampled,
            source_samples: self.source_samples,
        }
    }

    /// Distance between spherical images: pointwise Hausdorff for polyhedral
    /// cones, vertex-to-polyline Hausdorff when either cone is sampled from a
    /// smooth body (sample phases are unrelated between cones).
    pub fn image_distance(&self, other_rays: &[Vector3<f64>], sampled: bool) -> f64 {
        if sampled {
            vertex_curve_hausdorff(&self.rays, other_rays).expect("nonempty ray sets")
        } else {
            hausdorff_bounded(&self.rays, other_rays, f64::INFINITY)
        }
    }

    /// Smallest angle between a ray and the boundary facets' planes at `w`;
    /// positive iff `w` is interior.
    pub fn interior_margin(&self, w: &Vector3<f64>) -> f64 {
        let n = self.rays.len();
        (0..n)
            .map(|i| {
                self.rays[i]
                    .cross(&self.rays[(i + 1) % n])
                    .normalize()
                    .dot(w)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Support cone of `body` from apex `x`. Smooth bodies are sampled with
/// `samples` points along the exact silhouette.
pub fn support_cone(body: &ConvexBody3, x: &Point3, samples: usize) -> Result<SupportCone> {
    let gap = body.signed_gap(x);
    if !(gap > APEX_MARGIN) {
        return Err(Error::ApexInsideBody { gap });
    }
    match body {
        ConvexBody3::Polytope(p) => {
            let (facet, _) = p.most_violated_facet(x);
            let dirs: Vec<Vector3<f64>> =
                p.vertices().iter().map(|v| (v - x).normalize()).collect();
            SupportCone::with_interior_direction(*x, &dirs, &-facet.normal, false, dirs.len())
        }
        _ => {
            if samples < 3 {
                return Err(invalid("need at least 3 silhouette samples"));
            }
            let (c, a) = body.affine_frame().expect("smooth body");
            let inv = a
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular body frame".into()))?;
            let xl = inv * (x - c);
            let s2 = xl.norm_squared();
            let center = xl / s2;
            let rho = (1.0 - 1.0 / s2).sqrt();
            let f1 = any_orthonormal(&xl);
            let f2 = xl.normalize().cross(&f1);
            let dirs: Vec<Vector3<f64>> = (0..samples)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / samples as f64;
                    let z = center + (f1 * t.cos() + f2 * t.sin()) * rho;
                    (c + a * z - x).normalize()
                })
                .collect();
            let w = -(inv.transpose() * xl).normalize();
            SupportCone::with_interior_direction(*x, &dirs, &w, true, samples)
        }
    }
}

/// Extreme rays of the conical hull of unit `dirs`, given an interior
/// direction `w` with `⟨d, w⟩ > 0` for all `d`.
pub fn extreme_rays(dirs: &[Vector3<f64>], w: &Vector3<f64>) -> Result<Vec<Vector3<f64>>> {
    if !((w.norm() - 1.0).abs() <= 1e-9) {
        return Err(invalid("interior direction must be unit"));
    }
    let e1 = any_orthonormal(w);
    let e2 = w.cross(&e1);
    let mut proj = Vec::with_capacity(dirs.len());
    for d in dirs {
        let h = d.dot(w);
        if !(h > EPS_GEO) {
            return Err(invalid("cone is not salient"));
        }
        proj.push(Vector2::new(d.dot(&e1), d.dot(&e2)) / h);
    }
    let scale = proj.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let hull = convex_hull_2d(&proj, EPS_GEO * scale * scale);
    if hull.len() < 3 {
        return Err(Error::DegenerateBody("cone has empty interior".into()));
    }
    Ok(hull.into_iter().map(|i| dirs[i]).collect())
}

/// Some unit `w` with `⟨d, w⟩ > EPS_GEO` for every unit `d`, if one is found.
pub fn separating_direction(dirs: &[Vector3<f64>]) -> Option<Vector3<f64>> {
    if dirs.is_empty() {
        return None;
    }
    let mut acc: Vector3<f64> = dirs.iter().sum();
    for _ in 0..10_000 {
        if acc.norm() < 1e-300 {
            return None;
        }
        let w = acc.normalize();
        let (worst, val) = dirs
            .iter()
            .map(|d| (d, d.dot(&w)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if val > EPS_GEO {
            return Some(w);
        }
        acc += worst;
    }
    None
}

impl Serialize for SupportCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            apex: [f64; 3],
            rays: Vec<[f64; 3]>,
            axis: [f64; 3],
            is_sampled: bool,
            source_samples: usize,
        }
        Repr {
            apex: to_array(&self.apex),
            rays: self.rays.iter().map(to_array).collect(),
            axis: to_array(&self.canonical_axis()),
            is_sampled: self.is_sampled,
            source_samples: self.source_samples,
        }
        .serialize(s)
    }
}

/// Checks that every ray is unit and the set is salient and extreme.
pub fn validate_cone(c: &SupportCone) -> Result<()> {
    if c.rays.iter().any(|r| !((r.norm() - 1.0).abs() <= UNIT_TOL)) {
        return Err(invalid("non-unit ray"));
    }
    let w = c.canonical_axis();
    if !(c.rays.iter().all(|r| r.dot(&w) > EPS_GEO)) {
        return Err(invalid("cone is not salient about its axis"));
    }
    if !(c.interior_margin(&w) > 0.0) {
        return Err(invalid("canonical axis not interior"));
    }
    Ok(())
}
