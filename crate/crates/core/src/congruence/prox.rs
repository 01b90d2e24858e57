//! Proximal step for a max of affine functions:
//! `min_δ max_k (c_k + h_k·δ) + |δ|²/(2ρ)`.
//!
//! Solved through its dual, `min_{λ ∈ simplex} (ρ/2)|Hλ|² − c·λ`, by a
//! fully corrective active-set method. The primal minimizer `δ = −ρHλ` is
//! unique even when `λ` is not, and the objective is invariant under
//! orthogonal changes of coordinates.

use nalgebra::{DMatrix, DVector, Vector3};

/// Returns `δ` and the model value `max_k (c_k + h_k·δ)` at it.
pub(crate) fn prox_step(c: &[f64], h: &[Vector3<f64>], rho: f64) -> (Vector3<f64>, f64) {
    debug_assert_eq!(c.len(), h.len());
    // a small ridge on λ makes the dual strictly convex, so duplicated or
    // affinely dependent pieces share weight instead of making the
    // subproblems singular; δ moves by O(ridge)
    let ridge = 1e-10 * rho;
    let kmax = (0..c.len())
        .max_by(|&i, &j| c[i].total_cmp(&c[j]).then(j.cmp(&i)))
        .expect("at least one piece");
    let mut support = vec![kmax];
    let mut lambda = vec![1.0];
    for _ in 0..4 * c.len() + 8 {
        let x = combine(h, &support, &lambda);
        let weight = |k: usize| {
            support
                .iter()
                .position(|&s| s == k)
                .map_or(0.0, |i| lambda[i])
        };
        let grad = |k: usize| rho * h[k].dot(&x) + ridge * weight(k) - c[k];
        let current: f64 = support
            .iter()
            .zip(&lambda)
            .map(|(&k, &l)| l * grad(k))
            .sum();
        let (knew, gnew) = (0..c.len())
            .filter(|k| !support.contains(k))
            .map(|k| (k, grad(k)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap_or((usize::MAX, f64::INFINITY));
        let scale = 1.0 + rho * x.norm_squared() + c[kmax].abs();
        if gnew >= current - 1e-13 * scale {
            break;
        }
        support.push(knew);
        lambda.push(0.0);
        corrective(c, h, rho, ridge, &mut support, &mut lambda);
    }
    let delta = -combine(h, &support, &lambda) * rho;
    let model = c
        .iter()
        .zip(h)
        .map(|(ck, hk)| ck + hk.dot(&delta))
        .fold(f64::NEG_INFINITY, f64::max);
    (delta, model)
}

fn combine(h: &[Vector3<f64>], support: &[usize], lambda: &[f64]) -> Vector3<f64> {
    support.iter().zip(lambda).map(|(&k, &l)| h[k] * l).sum()
}

/// Minimizes the dual over the convex hull of the current support, dropping
/// pieces whose weight reaches zero.
fn corrective(
    c: &[f64],
    h: &[Vector3<f64>],
    rho: f64,
    ridge: f64,
    support: &mut Vec<usize>,
    lambda: &mut Vec<f64>,
) {
    while support.len() > 1 {
        let s = support.len();
        let mut m = DMatrix::zeros(s + 1, s + 1);
        let mut rhs = DVector::zeros(s + 1);
        for i in 0..s {
            for j in 0..s {
                m[(i, j)] = rho * h[support[i]].dot(&h[support[j]]);
            }
            m[(i, i)] += ridge;
            m[(i, s)] = 1.0;
            m[(s, i)] = 1.0;
            rhs[i] = c[support[i]];
        }
        rhs[s] = 1.0;
        let Some(sol) = m.full_piv_lu().solve(&rhs) else {
            return;
        };
        let mu: Vec<f64> = (0..s).map(|i| sol[i]).collect();
        if mu.iter().all(|&x| x > 0.0) {
            *lambda = mu;
            return;
        }
        // step toward μ until the first weight hits zero, then drop it
        let mut t = 1.0f64;
        let mut drop = 0;
        for i in 0..s {
            if mu[i] <= 0.0 {
                let ti = lambda[i] / (lambda[i] - mu[i]);
                if ti < t {
                    t = ti;
                    drop = i;
                }
            }
        }
        for i in 0..s {
            lambda[i] += t * (mu[i] - lambda[i]);
        }
        lambda[drop] = 0.0;
        let mut i = 0;
        while i < support.len() {
            if lambda[i] <= 0.0 {
                support.remove(i);
                lambda.remove(i);
            } else {
                i += 1;
            }
        }
        let total: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= total);
    }
    if support.len() == 1 {
        lambda[0] = 1.0;
    }
}
