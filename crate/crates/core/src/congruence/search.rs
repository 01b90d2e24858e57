//! Registration of spherical images over O(3): axis-aligned planar grid,
//! icosahedral multistart, nearest-neighbour Procrustes iteration, and a
//! final pattern search on the Hausdorff objective for small ray sets.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};

use super::procrustes::procrustes_with_sign;
use super::prox::prox_step;
use super::CongruenceConfig;
use crate::cone::SupportCone;
use crate::geom::{
    angle_between, hausdorff_bounded, icosahedral_rotations, polar_orthogonal,
    rotation_from_vector, rotation_matrix,
};

/// A cone reduced to what the search needs, computed once per cone.
#[derive(Debug, Clone)]
pub(crate) struct PreparedCone {
    pub rays: Vec<Vector3<f64>>,
    sub: Vec<Vector3<f64>>,
    icp: Vec<Vector3<f64>>,
    /// Columns `(e, w × e, w)`: canonical axis `w` and the direction `e` of
    /// the ray farthest from it, projected to the plane normal to `w`.
    frame: Matrix3<f64>,
}

impl PreparedCone {
    pub fn new(cone: &SupportCone, cfg: &CongruenceConfig) -> Self {
        let rays = cone.rays().to_vec();
        let w = cone.canonical_axis();
        let mut start = 0;
        let mut widest = f64::NEG_INFINITY;
        for (i, r) in rays.iter().enumerate() {
            let a = angle_between(r, &w);
            if a > widest + 1e-12 {
                widest = a;
                start = i;
            }
        }
        let e = (rays[start] - w * w.dot(&rays[start])).normalize();
        let frame = Matrix3::from_columns(&[e, w.cross(&e), w]);
        Self {
            sub: subsample(&rays, start, cfg.subsample),
            icp: subsample(&rays, start, cfg.icp_points),
            rays,
            frame,
        }
    }
}

fn subsample(rays: &[Vector3<f64>], start: usize, max: usize) -> Vec<Vector3<f64>> {
    let n = rays.len();
    if n <= max {
        return rays.to_vec();
    }
    let stride = n.div_ceil(max);
    (0..n)
        .step_by(stride)
        .map(|k| rays[(start + k) % n])
        .collect()
}

const SCREEN_RADIUS: f64 = 1e-3;
const SCREEN_STEPS: usize = 12;

#[derive(Clone, Copy)]
struct Candidate {
    score: f64,
    omega: Matrix3<f64>,
    sign: f64,
    slot: usize,
}

fn score(
    omega: &Matrix3<f64>,
    a: &[Vector3<f64>],
    b: &[Vector3<f64>],
    buf: &mut Vec<Vector3<f64>>,
    cutoff: f64,
) -> f64 {
    buf.clear();
    buf.extend(a.iter().map(|p| omega * p));
    hausdorff_bounded(buf, b, cutoff)
}

/// Best `Ω` found for `Ω·A ≈ B`, with its full Hausdorff residual and whether
/// the global search ran (which makes the reverse registration redundant).
pub(crate) fn register(
    a: &PreparedCone,
    b: &PreparedCone,
    cfg: &CongruenceConfig,
    tol: f64,
) -> (f64, Matrix3<f64>, bool) {
    let mut buf = Vec::with_capacity(a.rays.len());
    let small = a.rays.len() <= cfg.polish_max_rays && b.rays.len() <= cfg.polish_max_rays;
    let steps = cfg.planar_steps.max(1);
    let mut cands = Vec::with_capacity(2 * steps);
    let mut best_sub = f64::INFINITY;
    for (si, sign) in [1.0, -1.0].into_iter().enumerate() {
        let base = Matrix3::from_diagonal(&Vector3::new(1.0, sign, 1.0)) * a.frame.transpose();
        for k in 0..steps {
            let psi = TAU * k as f64 / steps as f64;
            let omega = b.frame * rotation_matrix(&Vector3::z(), psi) * base;
            let cutoff = if small {
                f64::INFINITY
            } else {
                4.0 * best_sub + 1e-9
            };
            let s = score(&omega, &a.sub, &b.sub, &mut buf, cutoff);
            best_sub = best_sub.min(s);
            cands.push(Candidate {
                score: s,
                omega,
                sign,
                slot: si * steps + k,
            });
        }
    }
    let picked = if small {
        // local minima of the grid along each planar circle, plus fits of
        // consecutive ray triples
        let mut pool: Vec<Candidate> = (0..cands.len())
            .filter(|&i| {
                let base = i / steps * steps;
                let prev = base + (i + steps - 1) % steps;
                let next = base + (i + 1) % steps;
                cands[i].score <= cands[prev].score && cands[i].score <= cands[next].score
            })
            .map(|i| cands[i])
            .collect();
        pool.extend(triple_seeds(a, b, &mut buf, 2 * steps));
        select(pool, cfg.refine_candidates_small, |x, y| {
            x.sign == y.sign && (x.omega - y.omega).norm() < 1e-3
        })
    } else {
        let min_sep = (steps / 72).max(1);
        select(cands, cfg.refine_candidates, |x, y| {
            x.sign == y.sign && circular_gap(x.slot % steps, y.slot % steps, steps) < min_sep
        })
    };
    let mut refined = refine_all(a, b, &picked, cfg, &mut buf);
    let best = refined.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);

    let global = small && best > cfg.multistart_factor * tol;
    if best > cfg.multistart_factor * tol {
        if small {
            let start = refined
                .iter()
                .copied()
                .min_by(|x, y| x.0.total_cmp(&y.0))
                .unwrap_or((f64::INFINITY, Matrix3::identity()));
            refined.extend(branch_and_bound(a, b, start, cfg, &mut buf));
        } else {
            let picked = select(
                icosahedral_seeds(a, b, &mut buf),
                cfg.refine_candidates,
                |x, y| x.sign == y.sign && (x.omega - y.omega).norm() < 0.3,
            );
            refined.extend(refine_all(a, b, &picked, cfg, &mut buf));
        }
    }

    let (d, omega) = if small {
        polish_distinct(a, b, refined, cfg, &mut buf)
    } else {
        refined
            .into_iter()
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .unwrap_or((f64::INFINITY, Matrix3::identity()))
    };
    (d, omega, global)
}

fn icosahedral_seeds(
    a: &PreparedCone,
    b: &PreparedCone,
    buf: &mut Vec<Vector3<f64>>,
) -> Vec<Candidate> {
    let mut seeds = Vec::with_capacity(120);
    for (gi, g) in icosahedral_rotations().iter().enumerate() {
        for sign in [1.0, -1.0] {
            let omega = b.frame
                * g
                * Matrix3::from_diagonal(&Vector3::new(1.0, sign, 1.0))
                * a.frame.transpose();
            let s = score(&omega, &a.sub, &b.sub, buf, f64::INFINITY);
            seeds.push(Candidate {
                score: s,
                omega,
                sign,
                slot: gi,
            });
        }
    }
    seeds
}

/// Cube `[c − σ, c + σ]³` of rotation vectors with a lower bound on the
/// residual over every map `exp(r)·S` inside it.
struct Cell {
    bound: f64,
    center: Vector3<f64>,
    half: f64,
    reflect: bool,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.bound.total_cmp(&other.bound).is_eq()
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // reversed: the heap pops the smallest bound first
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.bound.total_cmp(&self.bound)
    }
}

/// Best-first pruned search over O(3) in rotation-vector coordinates.
/// For `r` in a cube of half-side `σ` about `c`, `exp(r)·p` lies within angle
/// `√3σ` of `exp(c)·p`, and the Hausdorff residual moves by at most the chord
/// of that angle, so `h(c) − chord` bounds the cube from below. Returns the
/// distinct best cube centres found, each refined by ICP.
fn branch_and_bound(
    a: &PreparedCone,
    b: &PreparedCone,
    start: (f64, Matrix3<f64>),
    cfg: &CongruenceConfig,
    buf: &mut Vec<Vector3<f64>>,
) -> Vec<(f64, Matrix3<f64>)> {
    use std::collections::BinaryHeap;
    use std::f64::consts::PI;

    let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
    let map = |r: &Vector3<f64>, reflect: bool| {
        let rot = rotation_from_vector(r);
        if reflect {
            rot * reflection
        } else {
            rot
        }
    };
    let chord = |half: f64| 2.0 * ((3f64.sqrt() * half).min(PI) / 2.0).sin();
    let mut best = start;
    // keep a few distinct good centres: neighbouring basins are polished too
    let mut leaders: Vec<(f64, Matrix3<f64>, bool)> = Vec::new();
    let note = |value: f64, omega: Matrix3<f64>, reflect: bool, leaders: &mut Vec<_>| {
        if leaders
            .iter()
            .any(|l: &(f64, Matrix3<f64>, bool)| (l.1 - omega).norm() < 0.05)
        {
            for l in leaders.iter_mut() {
                if (l.1 - omega).norm() < 0.05 && value < l.0 {
                    *l = (value, omega, reflect);
                }
            }
        } else {
            leaders.push((value, omega, reflect));
        }
        leaders.sort_by(|x, y| x.0.total_cmp(&y.0));
        leaders.truncate(cfg.refine_candidates_small);
    };
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let split = 4;
    let half = PI / split as f64;
    for reflect in [false, true] {
        for i in 0..split {
            for j in 0..split {
                for k in 0..split {
                    let c = Vector3::new(i as f64, j as f64, k as f64) * (2.0 * half)
                        - Vector3::repeat(PI - half);
                    // cubes wholly outside the ball of radius π repeat others
                    let nearest = c.map(|x| (x.abs() - half).max(0.0));
                    if nearest.norm() > PI {
                        continue;
                    }
                    let omega = map(&c, reflect);
                    let v = score(&omega, &a.rays, &b.rays, buf, f64::INFINITY);
                    evals += 1;
                    if v < best.0 {
                        best = (v, omega);
                    }
                    note(v, omega, reflect, &mut leaders);
                    heap.push(Cell {
                        bound: v - chord(half),
                        center: c,
                        half,
                        reflect,
                    });
                }
            }
        }
    }
    let gap = |best: f64| (cfg.bnb_relative_gap * best).max(1e-12);
    while let Some(cell) = heap.pop() {
        if cell.bound >= best.0 - gap(best.0) || evals >= cfg.bnb_max_evaluations {
            break;
        }
        let h = 0.5 * cell.half;
        for corner in 0..8 {
            let offset = Vector3::new(
                if corner & 1 == 0 { -h } else { h },
                if corner & 2 == 0 { -h } else { h },
                if corner & 4 == 0 { -h } else { h },
            );
            let c = cell.center + offset;
            let omega = map(&c, cell.reflect);
            // past this value the child is pruned and cannot improve the
            // incumbent, so its exact residual is moot
            let cutoff = (best.0 - gap(best.0) + chord(h)).max(best.0);
            let v = score(&omega, &a.rays, &b.rays, buf, cutoff);
            evals += 1;
            if v < best.0 {
                best = (v, omega);
            }
            let bound = v - chord(h);
            if bound < best.0 - gap(best.0) {
                note(v, omega, cell.reflect, &mut leaders);
                heap.push(Cell {
                    bound,
                    center: c,
                    half: h,
                    reflect: cell.reflect,
                });
            }
        }
    }
    log::trace!("branch and bound: {evals} evaluations, best {:e}", best.0);
    let picked: Vec<Candidate> = leaders
        .iter()
        .enumerate()
        .map(|(slot, &(score, omega, reflect))| Candidate {
            score,
            omega,
            sign: if reflect { -1.0 } else { 1.0 },
            slot,
        })
        .collect();
    let mut out = refine_all(a, b, &picked, cfg, buf);
    out.push(best);
    out
}

/// Orthogonal fits mapping each run of three consecutive rays of `a` onto
/// each run of `b`, in the same cyclic direction for proper maps and the
/// reverse one for improper maps.
fn triple_seeds(
    a: &PreparedCone,
    b: &PreparedCone,
    buf: &mut Vec<Vector3<f64>>,
    slot0: usize,
) -> Vec<Candidate> {
    let (n, m) = (a.rays.len(), b.rays.len());
    let mut out = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        let pa = [a.rays[(i + n - 1) % n], a.rays[i], a.rays[(i + 1) % n]];
        for k in 0..m {
            let fwd = [b.rays[(k + m - 1) % m], b.rays[k], b.rays[(k + 1) % m]];
            for (sign, qb) in [(1.0, fwd), (-1.0, [fwd[2], fwd[1], fwd[0]])] {
                let pairs: Vec<_> = pa.iter().copied().zip(qb).collect();
                let omega = procrustes_with_sign(&pairs, sign);
                let s = score(&omega, &a.sub, &b.sub, buf, f64::INFINITY);
                out.push(Candidate {
                    score: s,
                    omega,
                    sign,
                    slot: slot0 + out.len(),
                });
            }
        }
    }
    out
}

fn circular_gap(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

fn select(
    mut cands: Vec<Candidate>,
    k: usize,
    too_close: impl Fn(&Candidate, &Candidate) -> bool,
) -> Vec<Candidate> {
    cands.sort_by(|x, y| x.score.total_cmp(&y.score).then(x.slot.cmp(&y.slot)));
    let mut out: Vec<Candidate> = Vec::with_capacity(k);
    for c in cands {
        if out.len() == k {
            break;
        }
        if out.iter().all(|p| !too_close(p, &c)) {
            out.push(c);
        }
    }
    out
}

/// Procrustes refinement of each candidate; keeps the better of the start
/// and the refined `Ω`. Stops early on an exact match.
fn refine_all(
    a: &PreparedCone,
    b: &PreparedCone,
    picked: &[Candidate],
    cfg: &CongruenceConfig,
    buf: &mut Vec<Vector3<f64>>,
) -> Vec<(f64, Matrix3<f64>)> {
    let mut out = Vec::with_capacity(picked.len());
    for c in picked {
        let mut local = (f64::INFINITY, c.omega);
        for omega in [c.omega, icp(a, b, c.omega, c.sign, cfg)] {
            let d = score(&omega, &a.rays, &b.rays, buf, f64::INFINITY);
            if d < local.0 {
                local = (d, omega);
            }
        }
        let exact = local.0 <= super::EXACT_MATCH;
        out.push(local);
        if exact {
            break;
        }
    }
    out
}

/// Minimax polish of the distinct refined local optima that are within a
/// factor of the best one.
fn polish_distinct(
    a: &PreparedCone,
    b: &PreparedCone,
    mut refined: Vec<(f64, Matrix3<f64>)>,
    cfg: &CongruenceConfig,
    buf: &mut Vec<Vector3<f64>>,
) -> (f64, Matrix3<f64>) {
    refined.sort_by(|x, y| x.0.total_cmp(&y.0));
    let Some(&first) = refined.first() else {
        return (f64::INFINITY, Matrix3::identity());
    };
    if first.0 <= super::EXACT_MATCH {
        return first;
    }
    // coarse pass from every distinct start, then full precision on the best
    let mut screened: Vec<(f64, Matrix3<f64>)> = Vec::new();
    let mut starts: Vec<Matrix3<f64>> = Vec::new();
    for (value, omega) in refined {
        if starts.len() == cfg.screen_candidates || value > 1.5 * first.0 {
            break;
        }
        if starts.iter().any(|o| (o - omega).norm() < 1e-6) {
            continue;
        }
        starts.push(omega);
        screened.push(polish(a, b, omega, value, SCREEN_RADIUS, SCREEN_STEPS, buf));
    }
    screened.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = first;
    let mut done: Vec<Matrix3<f64>> = Vec::new();
    for (value, omega) in screened {
        if done.len() == cfg.polish_candidates {
            break;
        }
        if done.iter().any(|o| (o - omega).norm() < 1e-4) {
            continue;
        }
        done.push(omega);
        let p = polish(a, b, omega, value, 1e-13, 200, buf);
        let p = super::newton::finish(&p.1, p.0, &a.rays, &b.rays);
        if p.0 < best.0 {
            best = p;
        }
    }
    best
}

fn nearest<'a>(p: &Vector3<f64>, set: &'a [Vector3<f64>]) -> &'a Vector3<f64> {
    let mut best = &set[0];
    let mut best_d = f64::INFINITY;
    for q in set {
        let d = (p - q).norm_squared();
        if d < best_d {
            best_d = d;
            best = q;
        }
    }
    best
}

/// Nearest-neighbour correspondences in both directions, re-fitted by
/// Procrustes with the determinant held fixed.
fn icp(
    a: &PreparedCone,
    b: &PreparedCone,
    start: Matrix3<f64>,
    sign: f64,
    cfg: &CongruenceConfig,
) -> Matrix3<f64> {
    let mut omega = start;
    let mut pairs = Vec::with_capacity(a.icp.len() + b.icp.len());
    for _ in 0..cfg.max_iterations {
        pairs.clear();
        let inv = omega.transpose();
        for p in &a.icp {
            pairs.push((*p, *nearest(&(omega * p), &b.rays)));
        }
        for q in &b.icp {
            pairs.push((*nearest(&(inv * q), &a.rays), *q));
        }
        let next = procrustes_with_sign(&pairs, sign);
        let delta = (next - omega).norm();
        omega = next;
        if delta < cfg.convergence {
            break;
        }
    }
    omega
}

/// Local minimax refinement of the exact Hausdorff residual. Nearest-neighbour
/// pairs are frozen at the current `Ω`, their distances linearized in a
/// rotation increment `δ`, and a proximal step on the max of the
/// linearizations is taken; the proximal weight acts as a trust radius.
fn polish(
    a: &PreparedCone,
    b: &PreparedCone,
    start: Matrix3<f64>,
    start_value: f64,
    min_radius: f64,
    max_steps: usize,
    buf: &mut Vec<Vector3<f64>>,
) -> (f64, Matrix3<f64>) {
    let mut omega = start;
    let mut value = start_value;
    let mut rho = 1e-2;
    let mut c = Vec::new();
    let mut h = Vec::new();
    for _ in 0..max_steps {
        if rho < min_radius || value == 0.0 {
            break;
        }
        c.clear();
        h.clear();
        let moved: Vec<Vector3<f64>> = a.rays.iter().map(|p| omega * p).collect();
        let mut piece = |p: &Vector3<f64>, q: &Vector3<f64>| {
            let diff = p - q;
            let g = diff.norm();
            // |δ| ≤ ρ, so pieces this far below the max cannot become active
            if g > 0.0 && g >= value - 2.0 * rho {
                c.push(g);
                h.push(p.cross(&diff) / g);
            }
        };
        for p in &moved {
            piece(p, nearest(p, &b.rays));
        }
        for q in &b.rays {
            piece(nearest(q, &moved), q);
        }
        if c.is_empty() {
            break;
        }
        let (delta, model) = prox_step(&c, &h, rho);
        let predicted = value - model;
        if predicted <= 1e-13 {
            break;
        }
        let cand = rotation_from_vector(&delta) * omega;
        let v = score(&cand, &a.rays, &b.rays, buf, value);
        if v < value {
            if value - v > 0.75 * predicted {
                rho = (2.0 * rho).min(0.1);
            }
            value = v;
            omega = cand;
        } else {
            rho *= 0.25;
        }
    }
    let omega = polar_orthogonal(&omega);
    (score(&omega, &a.rays, &b.rays, buf, f64::INFINITY), omega)
}
