//! Brute-force search over a grid of orthogonal maps, independent of the
//! library's registration code.

use nalgebra::{Matrix3, Vector3};

type V = Vector3<f64>;

fn icosahedron() -> (Vec<V>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let v: Vec<V> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| V::new(x, y, z).normalize())
    .collect();
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f)
}

/// Geodesic grid of frequency `f` (10f² + 2 directions) and a rigorous bound
/// on its covering radius: the largest angular circumradius of its cells.
pub fn geodesic_axes(f: usize) -> (Vec<V>, f64) {
    let (corners, faces) = icosahedron();
    let mut pts: Vec<V> = Vec::new();
    let mut cover: f64 = 0.0;
    let find = |pts: &mut Vec<V>, p: V| -> usize {
        match pts.iter().position(|q| (q - p).norm() < 1e-9) {
            Some(i) => i,
            None => {
                pts.push(p);
                pts.len() - 1
            }
        }
    };
    for [a, b, c] in faces {
        let (a, b, c) = (corners[a], corners[b], corners[c]);
        let grid = |i: usize, j: usize| {
            ((a * (f - i - j) as f64 + b * i as f64 + c * j as f64) / f as f64).normalize()
        };
        for i in 0..f {
            for j in 0..f - i {
                let mut cells = vec![[grid(i, j), grid(i + 1, j), grid(i, j + 1)]];
                if j + 1 < f - i {
                    cells.push([grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)]);
                }
                for [p, q, r] in cells {
                    let n = (q - p).cross(&(r - p)).normalize();
                    let n = if n.dot(&p) < 0.0 { -n } else { n };
                    cover = cover.max(n.dot(&p).clamp(-1.0, 1.0).acos());
                }
            }
        }
        for i in 0..=f {
            for j in 0..=f - i {
                find(&mut pts, grid(i, j));
            }
        }
    }
    (pts, cover)
}

fn rodrigues(k: &V, psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * s + kx * kx * (1.0 - c)
}

/// Every `Rot(k, ψ)` and `Rot(k, ψ)·diag(1, 1, −1)` on the grid.
pub fn grid_maps(axes: &[V], psi_steps: usize) -> impl Iterator<Item = Matrix3<f64>> + '_ {
    let flip = Matrix3::from_diagonal(&V::new(1.0, 1.0, -1.0));
    axes.iter().flat_map(move |k| {
        (0..psi_steps).flat_map(move |s| {
            let r = rodrigues(k, std::f64::consts::TAU * s as f64 / psi_steps as f64);
            [r, r * flip]
        })
    })
}

/// Worst displacement of a unit vector between an arbitrary orthogonal map
/// and its nearest grid map.
pub fn resolution_bound(cover: f64, psi_steps: usize) -> f64 {
    let chord = 2.0 * (cover / 2.0).sin();
    2.0 * chord + std::f64::consts::PI / psi_steps as f64
}

fn point_segment(p: &V, a: &V, b: &V) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

pub fn point_polyline(p: &V, poly: &[V]) -> f64 {
    (0..poly.len())
        .map(|i| point_segment(p, &poly[i], &poly[(i + 1) % poly.len()]))
        .fold(f64::INFINITY, f64::min)
}

pub fn point_set(p: &V, set: &[V]) -> f64 {
    set.iter()
        .map(|q| (p - q).norm())
        .fold(f64::INFINITY, f64::min)
}

/// The distance the library minimizes, evaluated at one map: pointwise
/// Hausdorff, or vertex-to-polyline Hausdorff for sampled cones.
pub fn distance_at(omega: &Matrix3<f64>, a: &[V], b: &[V], sampled: bool) -> f64 {
    let moved: Vec<V> = a.iter().map(|r| omega * r).collect();
    let d = |p: &V, set: &[V]| {
        if sampled {
            point_polyline(p, set)
        } else {
            point_set(p, set)
        }
    };
    let ab = moved.iter().map(|p| d(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|p| d(p, &moved)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Smallest grid value of the full distance.
pub fn grid_min(a: &[V], b: &[V], sampled: bool, axes: &[V], psi_steps: usize) -> f64 {
    grid_maps(axes, psi_steps)
        .map(|m| distance_at(&m, a, b, sampled))
        .fold(f64::INFINITY, f64::min)
}

/// `min over the grid of max_a d(Ω·a, polyline b)`, minus the resolution
/// bound: a lower bound on the sampled congruence distance over all of O(3),
/// since the directed term is 1-Lipschitz in the displacement of each ray.
pub fn grid_lower_bound(a: &[V], b: &[V], axes: &[V], cover: f64, psi_steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for m in grid_maps(axes, psi_steps) {
        let mut worst: f64 = 0.0;
        for r in a {
            worst = worst.max(point_polyline(&(m * r), b));
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    best - resolution_bound(cover, psi_steps)
}
