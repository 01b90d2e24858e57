use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::eta::{eta_coverage, eta_map, min_angular_separation, section_field, EtaSample};
use super::scene::{project_to_boundary, Scene, SceneSpec};
use crate::cone::{support_cone, SupportCone};
use crate::congruence::{
    continuity_probe, optimized_witness, pairwise_congruence_matrix, CongruenceConfig, MatrixStats,
    ProbeConfig, ProbeReport,
};
use crate::error::Result;
use crate::geom::{any_orthonormal, to_array};
use crate::symmetry::{case_split, detect_symmetries, SymmetryClass};

/// Terms in each continuity-probe approach sequence.
const PROBE_TERMS: usize = 15;
/// Longitudes of the two probe meridians.
const PROBE_LONGITUDES: (f64, f64) = (0.0, std::f64::consts::FRAC_PI_2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// All cones congruent within tolerance, right circular, with circular
    /// sections.
    ConsistentWithBall,
    /// Some pair of cones is farther apart than the witness threshold.
    NonCongruenceWitness,
    /// Witnesses along two approaches have different limits while the
    /// residuals do not vanish.
    ContinuityViolation,
    /// Distances sit between the tolerance and the witness threshold, or the
    /// cones are congruent but not right circular, and the probe finds no
    /// violation.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConsistentWithBall => "consistent_with_ball",
            Verdict::NonCongruenceWitness => "non_congruence_witness",
            Verdict::ContinuityViolation => "continuity_violation",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionSummary {
    pub congruent_field: bool,
    pub all_circles: bool,
    pub radius_min: f64,
    pub radius_max: f64,
    pub lipschitz: f64,
    pub continuity_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConfig {
    pub tol: f64,
    pub witness_threshold: f64,
    pub samples_per_cone: usize,
    pub origin: [f64; 3],
    pub congruence: CongruenceConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scene: SceneSpec,
    pub config: EffectiveConfig,
    pub apexes: Vec<[f64; 3]>,
    pub congruence_matrix_summary: MatrixStats,
    pub symmetry_classes: Vec<SymmetryClass>,
    /// Half-angle of each right circular cone.
    pub half_angles: Vec<Option<f64>>,
    pub eta_samples: Vec<EtaSample>,
    pub eta_min_separation: f64,
    pub eta_coverage: f64,
    pub sections: SectionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuity_probe: Option<ProbeReport>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_distance: Option<f64>,
}

/// Support cones of the inner body from every scene apex.
pub fn scene_cones(scene: &Scene) -> Result<Vec<SupportCone>> {
    scene
        .apexes()
        .par_iter()
        .map(|x| support_cone(&scene.inner, x, scene.samples_per_cone()))
        .collect()
}

/// Witness limits along two meridians (in directions from the origin) that
/// run from near apex 0 into the boundary point opposite it.
fn probe(scene: &Scene, reference: &SupportCone, cfg: &CongruenceConfig) -> Result<ProbeReport> {
    let origin = scene.origin;
    let d0 = (reference.apex() - origin).normalize();
    let e1 = any_orthonormal(&d0);
    let e2 = d0.cross(&e1);
    let x_star = project_to_boundary(&scene.outer, &origin, &[-d0])?[0];
    let sequence = |longitude: f64| -> Result<Vec<SupportCone>> {
        let dirs: Vec<Vector3<f64>> = (0..PROBE_TERMS)
            .map(|n| {
                let gap = 0.5 * 0.25f64.powi(n as i32);
                let (s, c) = (std::f64::consts::PI - gap).sin_cos();
                (d0 * c + (e1 * longitude.cos() + e2 * longitude.sin()) * s).normalize()
            })
            .collect();
        project_to_boundary(&scene.outer, &origin, &dirs)?
            .iter()
            .map(|x| support_cone(&scene.inner, x, scene.samples_per_cone()))
            .collect()
    };
    let u = sequence(PROBE_LONGITUDES.0)?;
    let v = sequence(PROBE_LONGITUDES.1)?;
    let probe_cfg = ProbeConfig {
        residual_tol: scene.tol(),
        ..ProbeConfig::default()
    };
    continuity_probe(
        reference,
        &x_star,
        &u,
        &v,
        optimized_witness(reference, cfg),
        &probe_cfg,
    )
}

/// Cones → congruence matrix → symmetry classes → η → sections → verdict.
pub fn verify_scene(scene: &Scene) -> Result<VerificationReport> {
    let tol = scene.tol();
    let threshold = scene.witness_threshold();
    let ccfg = scene.congruence_config();
    let cones = scene_cones(scene)?;
    log::info!("{} cones built", cones.len());
    let matrix = pairwise_congruence_matrix(&cones, &ccfg);
    let stats = matrix.stats();
    log::info!("congruence matrix: max {:e}", stats.max);

    let reports: Vec<_> = cones
        .par_iter()
        .map(|c| detect_symmetries(c, tol))
        .collect();
    let classes: Vec<SymmetryClass> = reports.iter().map(case_split).collect();
    let half_angles: Vec<Option<f64>> = reports.iter().map(|r| r.half_angle).collect();

    let etas = eta_map(&cones, Some(&classes))?;
    let field = section_field(&cones, &etas, Some(&matrix), tol)?;
    let radii = field
        .sections
        .iter()
        .filter_map(|s| s.circle.map(|c| c.radius));
    let (radius_min, radius_max) = radii.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r), hi.max(r))
    });
    let sections = SectionSummary {
        congruent_field: field.congruent_field,
        all_circles: field.all_circles,
        radius_min,
        radius_max,
        lipschitz: field.lipschitz,
        continuity_violations: field.continuity_violations,
    };

    let all_circular = reports.iter().all(|r| r.is_right_circular);
    let mut continuity = None;
    let mut witness_pair = None;
    let verdict = if stats.max <= tol && all_circular && field.all_circles {
        Verdict::ConsistentWithBall
    } else if stats.max > threshold {
        witness_pair = stats.argmax;
        Verdict::NonCongruenceWitness
    } else if scene.config().continuity_probe {
        let report = probe(scene, &cones[0], &ccfg)?;
        let violated = report.continuity_violation;
        continuity = Some(report);
        if violated {
            Verdict::ContinuityViolation
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };

    Ok(VerificationReport {
        scene: scene.spec.clone(),
        config: EffectiveConfig {
            tol,
            witness_threshold: threshold,
            samples_per_cone: scene.samples_per_cone(),
            origin: to_array(&scene.origin),
            congruence: ccfg,
        },
        apexes: scene.apexes().iter().map(to_array).collect(),
        congruence_matrix_summary: stats,
        symmetry_classes: classes,
        half_angles,
        eta_min_separation: min_angular_separation(&etas),
        eta_coverage: eta_coverage(&etas),
        eta_samples: etas,
        sections,
        continuity_probe: continuity,
        witness_distance: witness_pair.map(|(i, j)| matrix.get(i, j)),
        verdict,
        witness_pair,
    })
}
