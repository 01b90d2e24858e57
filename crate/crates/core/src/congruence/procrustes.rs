use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geom::RigidMotion;

/// Orthogonal `Ω` (either determinant) minimizing `Σ |Ω·pᵢ − qᵢ|²`.
/// Rotations about the origin only; no translation is fitted.
pub fn procrustes_orthogonal(p: &[Vector3<f64>], q: &[Vector3<f64>]) -> Result<RigidMotion> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "correspondence sets differ in size ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    if p.len() < 3 {
        return Err(Error::RankDeficient(format!(
            "{} correspondences, need 3",
            p.len()
        )));
    }
    check_rank(p)?;
    let pairs: Vec<_> = p.iter().copied().zip(q.iter().copied()).collect();
    let proper = procrustes_with_sign(&pairs, 1.0);
    let improper = procrustes_with_sign(&pairs, -1.0);
    let best = if residual(&pairs, &improper) < residual(&pairs, &proper) {
        improper
    } else {
        proper
    };
    Ok(RigidMotion::from_parts(best, Vector3::zeros()))
}

fn check_rank(p: &[Vector3<f64>]) -> Result<()> {
    let scatter: Matrix3<f64> = p.iter().map(|v| v * v.transpose()).sum();
    let sv = scatter.singular_values();
    let mut s = [sv[0], sv[1], sv[2]];
    s.sort_by(|a, b| b.total_cmp(a));
    if !(s[1] > 1e-12 * s[0]) {
        return Err(Error::RankDeficient(
            "points are collinear with the origin".into(),
        ));
    }
    Ok(())
}

pub(crate) fn residual(pairs: &[(Vector3<f64>, Vector3<f64>)], omega: &Matrix3<f64>) -> f64 {
    pairs
        .iter()
        .map(|(p, q)| (omega * p - q).norm_squared())
        .sum()
}

/// Best orthogonal map with `det = sign`.
pub(crate) fn procrustes_with_sign(
    pairs: &[(Vector3<f64>, Vector3<f64>)],
    sign: f64,
) -> Matrix3<f64> {
    let h: Matrix3<f64> = pairs.iter().map(|(p, q)| q * p.transpose()).sum();
    let svd = h.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    // singular values are not sorted by nalgebra; flip the smallest one
    let sv = svd.singular_values;
    let k = (0..3).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).unwrap();
    let mut d = Vector3::new(1.0, 1.0, 1.0);
    if (u * vt).determinant() * sign < 0.0 {
        d[k] = -1.0;
    }
    u * Matrix3::from_diagonal(&d) * vt
}
