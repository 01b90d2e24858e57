//! Congruence of support cones under `Φ = a + Ω`, `Ω ∈ O(3)`.
//!
//! Cones have distinguished apexes, so the translation is forced to
//! `apex₂ − Ω·apex₁` and only `Ω` is searched. The distance is the smallest
//! Hausdorff distance between `Ω·rays(C1)` and `rays(C2)` that the search
//! finds. Pairs with few rays that are not congruent get a pruned search over
//! all of O(3), which makes the result independent of the search direction;
//! for the rest the better of both directions is kept. No optimality
//! certificate is reported: the pruned search has an evaluation budget.

mod newton;
mod probe;
mod procrustes;
mod prox;
mod search;

pub use probe::{continuity_probe, optimized_witness, ProbeConfig, ProbeReport, SequenceLimit};
pub use procrustes::procrustes_orthogonal;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::SupportCone;
use crate::geom::{hausdorff_bounded, matrix_rows, RigidMotion};
use search::{register, PreparedCone};

/// Below this the reverse search is skipped: the pair is already matched.
const EXACT_MATCH: f64 = 1e-10;

/// Tolerances and search sizes for [`congruence_distance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CongruenceConfig {
    pub tol_polyhedral: f64,
    pub tol_sampled: f64,
    /// Planar rotation steps after axis alignment.
    pub planar_steps: usize,
    /// Cap on Procrustes iterations per candidate.
    pub max_iterations: usize,
    /// Stop iterating once successive `Ω` differ by less than this (Frobenius).
    pub convergence: f64,
    /// Icosahedral multistart runs when the best residual exceeds this
    /// multiple of the tolerance.
    pub multistart_factor: f64,
    /// Rays used to score grid candidates.
    pub subsample: usize,
    /// Rays per side used as correspondences during refinement.
    pub icp_points: usize,
    /// Grid candidates refined for large ray sets.
    pub refine_candidates: usize,
    /// Grid local minima refined for ray sets small enough to polish.
    pub refine_candidates_small: usize,
    /// Distinct refined optima given a coarse polish.
    pub screen_candidates: usize,
    /// Best coarse results polished to full precision.
    pub polish_candidates: usize,
    /// Pattern-search polish on the exact residual is run when both cones
    /// have at most this many rays.
    pub polish_max_rays: usize,
    /// Global search on small non-congruent pairs stops once no region can
    /// beat the incumbent by more than this fraction of it.
    pub bnb_relative_gap: f64,
    /// Cap on residual evaluations in that search.
    pub bnb_max_evaluations: usize,
}

impl Default for CongruenceConfig {
    fn default() -> Self {
        Self {
            tol_polyhedral: 1e-6,
            tol_sampled: 1e-3,
            planar_steps: 720,
            max_iterations: 100,
            convergence: 1e-12,
            multistart_factor: 10.0,
            subsample: 48,
            icp_points: 64,
            refine_candidates: 4,
            refine_candidates_small: 24,
            screen_candidates: 24,
            polish_candidates: 3,
            polish_max_rays: 64,
            bnb_relative_gap: 1e-3,
            bnb_max_evaluations: 200_000,
        }
    }
}

impl CongruenceConfig {
    /// Tolerance for a pair: the sampled one if either cone is sampled.
    pub fn tol_for(&self, c1: &SupportCone, c2: &SupportCone) -> f64 {
        if c1.is_sampled() || c2.is_sampled() {
            self.tol_sampled
        } else {
            self.tol_polyhedral
        }
    }
}

/// Outcome of a registration. The witness maps cone 1 onto cone 2 and is
/// one of possibly many optimal motions when the cones are symmetric.
#[derive(Debug, Clone, Serialize)]
pub struct CongruenceResult {
    pub distance: f64,
    pub witness: Option<RigidMotion>,
    pub congruent: bool,
    pub tol: f64,
}

fn witness_for(omega: Matrix3<f64>, c1: &SupportCone, c2: &SupportCone) -> RigidMotion {
    let a = c2.apex() - omega * c1.apex();
    RigidMotion::from_parts(omega, a)
}

fn distance_prepared(
    p1: &PreparedCone,
    p2: &PreparedCone,
    cfg: &CongruenceConfig,
    tol: f64,
) -> (f64, Matrix3<f64>) {
    let (d, omega, global) = register(p1, p2, cfg, tol);
    if d <= EXACT_MATCH || global {
        return (d, omega);
    }
    let (d_rev, omega_rev, _) = register(p2, p1, cfg, tol);
    if d_rev < d {
        // report the residual of the returned witness itself
        let omega = omega_rev.transpose();
        let moved: Vec<_> = p1.rays.iter().map(|r| omega * r).collect();
        (hausdorff_bounded(&moved, &p2.rays, f64::INFINITY), omega)
    } else {
        (d, omega)
    }
}

/// Congruence distance and witness for `C1 → C2`.
pub fn congruence_distance(
    c1: &SupportCone,
    c2: &SupportCone,
    cfg: &CongruenceConfig,
) -> CongruenceResult {
    let tol = cfg.tol_for(c1, c2);
    let p1 = PreparedCone::new(c1, cfg);
    let p2 = PreparedCone::new(c2, cfg);
    let (distance, omega) = distance_prepared(&p1, &p2, cfg, tol);
    CongruenceResult {
        distance,
        witness: Some(witness_for(omega, c1, c2)),
        congruent: distance <= tol,
        tol,
    }
}

/// Symmetric matrix of congruence distances with the witness for each pair
/// `i < j` (mapping cone `i` onto cone `j`).
#[derive(Debug, Clone)]
pub struct CongruenceMatrix {
    n: usize,
    distances: Vec<f64>,
    witnesses: Vec<Option<RigidMotion>>,
}

/// Summary statistics over the off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Index pair of the largest entry.
    pub argmax: Option<(usize, usize)>,
}

impl CongruenceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.n + j]
    }

    /// Witness mapping cone `i` onto cone `j`, if `i ≠ j`.
    pub fn witness(&self, i: usize, j: usize) -> Option<RigidMotion> {
        if i == j {
            return Some(RigidMotion::identity());
        }
        self.witnesses[i * self.n + j]
    }

    pub fn stats(&self) -> MatrixStats {
        let mut vals = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        let mut argmax = None;
        let mut max = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.get(i, j);
                if argmax.is_none() || d > max {
                    max = d;
                    argmax = Some((i, j));
                }
                vals.push(d);
            }
        }
        if vals.is_empty() {
            return MatrixStats {
                max: 0.0,
                mean: 0.0,
                median: 0.0,
                argmax: None,
            };
        }
        vals.sort_by(f64::total_cmp);
        let m = vals.len();
        let median = if m % 2 == 1 {
            vals[m / 2]
        } else {
            0.5 * (vals[m / 2 - 1] + vals[m / 2])
        };
        MatrixStats {
            max,
            mean: vals.iter().sum::<f64>() / m as f64,
            median,
            argmax,
        }
    }

    /// CSV with a header row of column indices and one row per cone.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.n {
            out.push(',');
            out.push_str(&j.to_string());
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&i.to_string());
            for j in 0..self.n {
                out.push(',');
                out.push_str(&format!("{:e}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    /// Distances plus the witness of every upper-triangle pair.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect();
        let mut witnesses = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if let Some(w) = &self.witnesses[i * self.n + j] {
                    witnesses.push(serde_json::json!({
                        "i": i,
                        "j": j,
                        "omega": matrix_rows(w.omega()),
                        "a": [w.translation_part()[0], w.translation_part()[1], w.translation_part()[2]],
                    }));
                }
            }
        }
        serde_json::json!({ "n": self.n, "distances": rows, "witnesses": witnesses })
    }
}

/// All pairwise congruence distances. Pairs are computed in parallel and
/// collected in a fixed order, so the result does not depend on scheduling.
pub fn pairwise_congruence_matrix(
    cones: &[SupportCone],
    cfg: &CongruenceConfig,
) -> CongruenceMatrix {
    pairwise_subset(cones, cfg, |_, _| true)
}

/// Like [`pairwise_congruence_matrix`] but only pairs accepted by `keep` are
/// computed; the others are left as NaN without witness.
pub fn pairwise_subset(
    cones: &[SupportCone],
    cfg: &CongruenceConfig,
    keep: impl Fn(usize, usize) -> bool + Sync,
) -> CongruenceMatrix {
    let n = cones.len();
    let prepared: Vec<PreparedCone> = cones
        .par_iter()
        .map(|c| PreparedCone::new(c, cfg))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| keep(i, j))
        .collect();
    let results: Vec<(f64, Matrix3<f64>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let tol = cfg.tol_for(&cones[i], &cones[j]);
            distance_prepared(&prepared[i], &prepared[j], cfg, tol)
        })
        .collect();
    let mut distances = vec![f64::NAN; n * n];
    let mut witnesses = vec![None; n * n];
    for i in 0..n {
        distances[i * n + i] = 0.0;
    }
    for (&(i, j), (d, omega)) in pairs.iter().zip(results) {
        distances[i * n + j] = d;
        distances[j * n + i] = d;
        let w = witness_for(omega, &cones[i], &cones[j]);
        witnesses[j * n + i] = Some(w.inverse());
        witnesses[i * n + j] = Some(w);
    }
    CongruenceMatrix {
        n,
        distances,
        witnesses,
    }
}
