//! Second-order finish for the Hausdorff minimax once the active pieces are
//! known. First-order steps stall on the curved valleys where fewer than four
//! pieces are active; Newton's method on the KKT system of
//! `min t  s.t.  f_k(δ) ≤ t` follows them.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::geom::{hausdorff_bounded, rotation_from_vector};

/// Pieces whose value is within this of the max (relative to the value)
/// are taken as active.
const ACTIVE: [f64; 3] = [1e-9, 1e-7, 1e-5];
const MAX_PIECES: usize = 6;
const ITERATIONS: usize = 30;

/// Value, gradient and Hessian at `δ = 0` of `δ ↦ |exp(δ)·p − q|`.
fn piece(p: &Vector3<f64>, q: &Vector3<f64>) -> (f64, Vector3<f64>, Matrix3<f64>) {
    let u = p - q;
    let g = u.norm();
    let h = p.cross(&u) / g;
    let sym = 0.5 * (u * p.transpose() + p * u.transpose());
    let hess = (sym + Matrix3::identity() * (p.norm_squared() - u.dot(p))
        - p * p.transpose()
        - h * h.transpose())
        / g;
    (g, h, hess)
}

fn nearest(p: &Vector3<f64>, set: &[Vector3<f64>]) -> usize {
    (0..set.len())
        .min_by(|&i, &j| {
            (p - set[i])
                .norm_squared()
                .total_cmp(&(p - set[j]).norm_squared())
        })
        .expect("nonempty")
}

/// Nearest-neighbour pairs `(i, j)` (ray `i` of `a`, ray `j` of `b`) whose
/// distance is within `slack` of the Hausdorff value.
fn active_pairs(
    omega: &Matrix3<f64>,
    a: &[Vector3<f64>],
    b: &[Vector3<f64>],
    value: f64,
    slack: f64,
) -> Vec<(usize, usize)> {
    let moved: Vec<Vector3<f64>> = a.iter().map(|p| omega * p).collect();
    let mut pairs = Vec::new();
    let mut add = |i: usize, j: usize| {
        if (moved[i] - b[j]).norm() >= value - slack && !pairs.contains(&(i, j)) {
            pairs.push((i, j));
        }
    };
    for (i, p) in moved.iter().enumerate() {
        add(i, nearest(p, b));
    }
    for (j, q) in b.iter().enumerate() {
        add(nearest(q, &moved), j);
    }
    pairs
}

/// Newton iterations on the KKT system of the active pieces, started at
/// `omega`; `None` if the system is singular or diverges.
fn solve(
    omega: &Matrix3<f64>,
    a: &[Vector3<f64>],
    b: &[Vector3<f64>],
    pairs: &[(usize, usize)],
) -> Option<Matrix3<f64>> {
    let k = pairs.len();
    let n = k + 4;
    let mut omega = *omega;
    let mut lambda = vec![1.0 / k as f64; k];
    let mut t = pairs
        .iter()
        .map(|&(i, j)| (omega * a[i] - b[j]).norm())
        .fold(0.0, f64::max);
    for _ in 0..ITERATIONS {
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        let mut stat = Vector3::zeros();
        let mut lag = Matrix3::zeros();
        for (s, &(i, j)) in pairs.iter().enumerate() {
            let (g, h, hess) = piece(&(omega * a[i]), &b[j]);
            if !(g > 0.0) {
                return None;
            }
            stat += h * lambda[s];
            lag += hess * lambda[s];
            for r in 0..3 {
                jac[(r, 3 + s)] = h[r];
                jac[(3 + s, r)] = h[r];
            }
            jac[(3 + s, n - 1)] = -1.0;
            rhs[3 + s] = -(g - t);
            jac[(n - 1, 3 + s)] = 1.0;
        }
        // the last row is Σλ = 1; the t column enters only the piece rows
        jac[(n - 1, n - 1)] = 0.0;
        jac.view_mut((0, 0), (3, 3)).copy_from(&lag);
        for r in 0..3 {
            rhs[r] = -stat[r];
        }
        rhs[n - 1] = -(lambda.iter().sum::<f64>() - 1.0);
        let step = jac.full_piv_lu().solve(&rhs)?;
        if !step.iter().all(|x| x.is_finite()) {
            return None;
        }
        let delta = Vector3::new(step[0], step[1], step[2]);
        if delta.norm() > 0.1 {
            return None;
        }
        omega = rotation_from_vector(&delta) * omega;
        for (s, l) in lambda.iter_mut().enumerate() {
            *l += step[3 + s];
        }
        t += step[n - 1];
        if delta.norm() < 1e-15 {
            break;
        }
    }
    // negative multipliers mean the active set is wrong
    if lambda.iter().any(|&l| l < -1e-9) {
        return None;
    }
    Some(omega)
}

/// Tries Newton finishes for a few active-set thresholds and keeps the best
/// strict improvement of the exact residual.
pub(crate) fn finish(
    omega: &Matrix3<f64>,
    value: f64,
    a: &[Vector3<f64>],
    b: &[Vector3<f64>],
) -> (f64, Matrix3<f64>) {
    let mut best = (value, *omega);
    if !(value > 0.0) {
        return best;
    }
    let mut tried: Vec<Vec<(usize, usize)>> = Vec::new();
    for rel in ACTIVE {
        let pairs = active_pairs(omega, a, b, value, rel * value);
        if pairs.is_empty() || pairs.len() > MAX_PIECES || tried.contains(&pairs) {
            continue;
        }
        if let Some(candidate) = solve(omega, a, b, &pairs) {
            let moved: Vec<Vector3<f64>> = a.iter().map(|p| candidate * p).collect();
            let v = hausdorff_bounded(&moved, b, f64::INFINITY);
            if v < best.0 {
                best = (v, candidate);
            }
        }
        tried.push(pairs);
    }
    best
}
