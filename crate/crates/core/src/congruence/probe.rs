//! Probing whether congruence witnesses can be chosen continuously near an
//! apex: follow two approach sequences and compare the limiting orthogonal
//! parts.

use nalgebra::Matrix3;
use serde::{Serialize, Serializer};

use crate::cone::SupportCone;
use crate::error::{invalid, Result};
use crate::geom::{matrix_rows, Point3, RigidMotion};

#[derive(Debug, Clone, Serialize)]
pub struct ProbeConfig {
    /// Cauchy tolerance (Frobenius) over the trailing window.
    pub cauchy_tol: f64,
    pub cauchy_window: usize,
    /// Limits differ when `‖L₁⁻¹L₂ − I‖_F` exceeds this.
    pub differ_tol: f64,
    /// Residuals below this count as vanishing.
    pub residual_tol: f64,
    /// Apexes must end within this fraction of their initial distance to `x*`.
    pub approach_ratio: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            cauchy_tol: 1e-6,
            cauchy_window: 5,
            differ_tol: 1e-3,
            residual_tol: 1e-6,
            approach_ratio: 1e-3,
        }
    }
}

fn ser_matrix<S: Serializer>(m: &Matrix3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceLimit {
    /// Orthogonal part of the last witness.
    #[serde(serialize_with = "ser_matrix")]
    pub limit: Matrix3<f64>,
    /// Largest Frobenius distance between the last witness and the others
    /// in the trailing window.
    pub spread: f64,
    pub converged: bool,
    /// Distance between the image of the reference cone under the last
    /// witness and the last cone.
    pub final_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub u: SequenceLimit,
    pub v: SequenceLimit,
    /// `‖L₁⁻¹L₂ − I‖_F`.
    pub relative_distance: f64,
    pub limits_differ: bool,
    pub residuals_vanish: bool,
    /// When limits differ and residuals vanish: distance between the reference
    /// cone and its image under `L₁⁻¹L₂` about its apex.
    pub self_map_residual: Option<f64>,
    /// Residuals do not vanish or a sequence does not converge.
    pub hypothesis_violation: bool,
    /// Limits differ while residuals do not vanish.
    pub continuity_violation: bool,
}

fn check_approach(seq: &[SupportCone], x_star: &Point3, cfg: &ProbeConfig) -> Result<()> {
    if seq.len() < cfg.cauchy_window.max(2) {
        return Err(invalid(format!(
            "approach sequence has {} terms, need {}",
            seq.len(),
            cfg.cauchy_window.max(2)
        )));
    }
    let first = (seq[0].apex() - x_star).norm();
    let last = (seq[seq.len() - 1].apex() - x_star).norm();
    if !(last <= cfg.approach_ratio * first) {
        return Err(invalid(format!(
            "apexes do not approach x* (first {first:e}, last {last:e})"
        )));
    }
    Ok(())
}

fn follow<W>(
    reference: &SupportCone,
    seq: &[SupportCone],
    witness: &W,
    cfg: &ProbeConfig,
) -> Result<SequenceLimit>
where
    W: Fn(&SupportCone) -> Result<RigidMotion>,
{
    let start = seq.len() - cfg.cauchy_window.max(1);
    let mut omegas = Vec::with_capacity(seq.len() - start);
    let mut final_residual = 0.0;
    for c in &seq[start..] {
        let w = witness(c)?;
        let sampled = reference.is_sampled() || c.is_sampled();
        final_residual = reference.motion_image(&w).image_distance(c.rays(), sampled);
        omegas.push(*w.omega());
    }
    let limit = *omegas.last().expect("window is nonempty");
    let spread = omegas
        .iter()
        .map(|o| (o - limit).norm())
        .fold(0.0, f64::max);
    Ok(SequenceLimit {
        limit,
        spread,
        converged: spread <= cfg.cauchy_tol,
        final_residual,
    })
}

/// Limits of the witnesses `reference → uₙ` and `reference → vₙ` along two
/// sequences of cones whose apexes approach `x_star`.
///
/// `witness` supplies the motion for each cone; it may run the optimizer
/// (see [`optimized_witness`]) or follow a prescribed frame rule.
pub fn continuity_probe<W>(
    reference: &SupportCone,
    x_star: &Point3,
    u_seq: &[SupportCone],
    v_seq: &[SupportCone],
    witness: W,
    cfg: &ProbeConfig,
) -> Result<ProbeReport>
where
    W: Fn(&SupportCone) -> Result<RigidMotion>,
{
    check_approach(u_seq, x_star, cfg)?;
    check_approach(v_seq, x_star, cfg)?;
    let u = follow(reference, u_seq, &witness, cfg)?;
    let v = follow(reference, v_seq, &witness, cfg)?;
    let relative = u.limit.transpose() * v.limit;
    let relative_distance = (relative - Matrix3::identity()).norm();
    let limits_differ = relative_distance > cfg.differ_tol;
    let residuals_vanish =
        u.final_residual <= cfg.residual_tol && v.final_residual <= cfg.residual_tol;
    let self_map_residual = (limits_differ && residuals_vanish).then(|| {
        let apex = reference.apex();
        let phi = RigidMotion::from_parts(relative, apex - relative * apex);
        reference
            .motion_image(&phi)
            .image_distance(reference.rays(), reference.is_sampled())
    });
    Ok(ProbeReport {
        hypothesis_violation: !residuals_vanish || !u.converged || !v.converged,
        continuity_violation: limits_differ && !residuals_vanish,
        u,
        v,
        relative_distance,
        limits_differ,
        residuals_vanish,
        self_map_residual,
    })
}

/// Witness source that registers `reference` against each cone.
pub fn optimized_witness<'a>(
    reference: &'a SupportCone,
    cfg: &'a super::CongruenceConfig,
) -> impl Fn(&SupportCone) -> Result<RigidMotion> + 'a {
    move |c| {
        super::congruence_distance(reference, c, cfg)
            .witness
            .ok_or_else(|| crate::Error::Numerical("registration produced no witness".into()))
    }
}
