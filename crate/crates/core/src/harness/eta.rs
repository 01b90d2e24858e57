use nalgebra::Vector3;
use serde::{Serialize, Serializer};

use crate::cone::{PlanarSection, SupportCone};
use crate::congruence::CongruenceMatrix;
use crate::error::Result;
use crate::geom::{angle_between, hausdorff_distance, to_array, Point3};
use crate::symmetry::{detect_circle, CircleFit, SymmetryClass};
use crate::topology::geodesic_sphere;

/// Frequency of the sphere mesh whose cells measure η coverage.
const COVERAGE_FREQUENCY: usize = 3;
/// Slack factor on the data-driven Lipschitz constant of the section field.
const LIPSCHITZ_SLACK: f64 = 4.0;

fn ser_vec<S: Serializer>(v: &Vector3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_array(v).serialize(s)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaSample {
    #[serde(serialize_with = "ser_vec")]
    pub apex: Point3,
    #[serde(serialize_with = "ser_vec")]
    pub eta: Vector3<f64>,
    /// The cone has no detected axis, so η is only the canonical axis.
    pub fallback: bool,
}

/// `η(x)`: unit normal of the distance-1 cross-section of `C_x`, pointing
/// back toward the apex. With symmetry classes given, cones without an axis
/// are flagged.
pub fn eta_map(cones: &[SupportCone], classes: Option<&[SymmetryClass]>) -> Result<Vec<EtaSample>> {
    cones
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let fallback = classes.is_some_and(|cl| {
                !matches!(
                    cl[i],
                    SymmetryClass::AxisOfSymmetry | SymmetryClass::RightCircular
                )
            });
            Ok(EtaSample {
                apex: *c.apex(),
                eta: c.cross_section(1.0)?.normal(),
                fallback,
            })
        })
        .collect()
}

/// Smallest angle between two η values (`π` for fewer than two samples).
pub fn min_angular_separation(samples: &[EtaSample]) -> f64 {
    let mut best = std::f64::consts::PI;
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            best = best.min(angle_between(&a.eta, &b.eta));
        }
    }
    best
}

/// Fraction of the cells of a frequency-3 geodesic sphere containing at
/// least one η value: a sampled stand-in for surjectivity of η.
pub fn eta_coverage(samples: &[EtaSample]) -> f64 {
    let mesh = geodesic_sphere(COVERAGE_FREQUENCY);
    let mut hit = vec![false; mesh.triangles().len()];
    for s in samples {
        if let Some(t) = mesh.locate(&s.eta) {
            hit[t] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 / hit.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct TaggedSection {
    pub apex_index: usize,
    #[serde(serialize_with = "ser_vec")]
    pub eta: Vector3<f64>,
    pub section: PlanarSection,
    pub circle: Option<CircleFit>,
}

/// Distance-1 sections indexed by η, with a continuity check on nearest
/// neighbors in η.
#[derive(Debug, Clone, Serialize)]
pub struct SectionField {
    pub sections: Vec<TaggedSection>,
    /// Every pairwise congruence distance is within tolerance.
    pub congruent_field: bool,
    /// Every section has enough vertices and passes the circle test.
    pub all_circles: bool,
    /// Estimated Lipschitz constant of η ↦ section.
    pub lipschitz: f64,
    /// Nearest-neighbor pairs exceeding `L·angle + 2·tol`.
    pub continuity_violations: usize,
}

/// Section vertices relative to the apex, so that sections of nearby cones
/// can be compared directly.
fn relative_vertices(s: &PlanarSection, apex: &Point3) -> Vec<Vector3<f64>> {
    s.world_vertices().iter().map(|p| p - apex).collect()
}

pub fn section_field(
    cones: &[SupportCone],
    etas: &[EtaSample],
    matrix: Option<&CongruenceMatrix>,
    tol: f64,
) -> Result<SectionField> {
    let mut sections = Vec::with_capacity(cones.len());
    for (i, (c, e)) in cones.iter().zip(etas).enumerate() {
        let section = c.cross_section(1.0)?;
        let circle = detect_circle(&section, tol).ok();
        sections.push(TaggedSection {
            apex_index: i,
            eta: e.eta,
            section,
            circle,
        });
    }
    let congruent_field = matrix.is_some_and(|m| m.stats().max <= tol);
    let all_circles = sections
        .iter()
        .all(|s| s.circle.is_some_and(|c| c.is_circle));

    // nearest neighbor of each sample in η
    let mut pairs = Vec::new();
    for (i, a) in etas.iter().enumerate() {
        let nearest = etas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, b)| (angle_between(&a.eta, &b.eta), j))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((angle, j)) = nearest {
            let d = hausdorff_distance(
                &relative_vertices(&sections[i].section, cones[i].apex()),
                &relative_vertices(&sections[j].section, cones[j].apex()),
            )?;
            pairs.push((angle, d));
        }
    }
    let mut ratios: Vec<f64> = pairs
        .iter()
        .filter(|(a, _)| *a > 0.0)
        .map(|(a, d)| d / a)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let lipschitz = ratios
        .get(ratios.len() / 2)
        .map_or(0.0, |m| LIPSCHITZ_SLACK * m);
    let continuity_violations = pairs
        .iter()
        .filter(|(a, d)| *d > lipschitz * a + 2.0 * tol)
        .count();
    Ok(SectionField {
        sections,
        congruent_field,
        all_circles,
        lipschitz,
        continuity_violations,
    })
}
