use nalgebra::{SVector, Vector3};

use crate::error::{invalid, Result};

/// Directed Hausdorff distance `max_{a∈A} min_{b∈B} |a - b|`.
///
/// The inner loop stops as soon as a point of `B` is closer than the running
/// maximum, since such an `a` can no longer raise it.
pub fn directed_hausdorff<const D: usize>(a: &[SVector<f64, D>], b: &[SVector<f64, D>]) -> f64 {
    directed_bounded(a, b, f64::INFINITY)
}

fn directed_bounded<const D: usize>(
    a: &[SVector<f64, D>],
    b: &[SVector<f64, D>],
    cutoff: f64,
) -> f64 {
    let mut cmax2 = 0.0f64;
    let cutoff2 = cutoff * cutoff;
    for p in a {
        let mut cmin2 = f64::INFINITY;
        for q in b {
            let d2 = (p - q).norm_squared();
            if d2 < cmin2 {
                cmin2 = d2;
                if cmin2 <= cmax2 {
                    break;
                }
            }
        }
        if cmin2 > cmax2 {
            cmax2 = cmin2;
            if cmax2 > cutoff2 {
                return cmax2.sqrt();
            }
        }
    }
    cmax2.sqrt()
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance<const D: usize>(
    a: &[SVector<f64, D>],
    b: &[SVector<f64, D>],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("hausdorff distance of an empty set"));
    }
    Ok(hausdorff_bounded(a, b, f64::INFINITY))
}

/// Hausdorff distance that may stop early once the value is known to exceed
/// `cutoff`; the returned value is then some number greater than `cutoff`.
/// Both sets must be nonempty.
pub fn hausdorff_bounded<const D: usize>(
    a: &[SVector<f64, D>],
    b: &[SVector<f64, D>],
    cutoff: f64,
) -> f64 {
    let d1 = directed_bounded(a, b, cutoff);
    if d1 > cutoff {
        return d1;
    }
    d1.max(directed_bounded(b, a, cutoff))
}

fn point_segment_distance2(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm_squared()
}

fn directed_vertex_curve(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let n = b.len();
    let mut cmax2 = 0.0f64;
    for p in a {
        let mut cmin2 = f64::INFINITY;
        for i in 0..n {
            let d2 = point_segment_distance2(p, &b[i], &b[(i + 1) % n]);
            if d2 < cmin2 {
                cmin2 = d2;
                if cmin2 <= cmax2 {
                    break;
                }
            }
        }
        cmax2 = cmax2.max(cmin2);
    }
    cmax2.sqrt()
}

/// Hausdorff-type distance between two closed polygons given by their
/// cyclically ordered vertices: each vertex of one polygon is measured against
/// the closed polyline of the other, in both directions.
///
/// Insensitive to where the vertices sit along a common curve, which is what
/// matters when comparing boundary samples taken at unrelated phases.
pub fn vertex_curve_hausdorff(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("hausdorff distance of an empty set"));
    }
    Ok(directed_vertex_curve(a, b).max(directed_vertex_curve(b, a)))
}
