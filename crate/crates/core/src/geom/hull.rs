//! Convex hulls: incremental 3D hull for polytope bodies, monotone chain in
//! the plane for spherical images.

use std::collections::HashMap;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};

/// Triangulated convex hull with outward-oriented faces.
#[derive(Debug, Clone)]
pub struct Hull3 {
    /// Indices (into the input) of points that are hull vertices, ascending.
    pub vertices: Vec<usize>,
    /// Counterclockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

#[derive(Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: Vector3<f64>,
    offset: f64,
}

impl Face {
    fn new(pts: &[Vector3<f64>], v: [usize; 3]) -> Face {
        let n = (pts[v[1]] - pts[v[0]])
            .cross(&(pts[v[2]] - pts[v[0]]))
            .normalize();
        Face {
            v,
            normal: n,
            offset: n.dot(&pts[v[0]]),
        }
    }

    fn height(&self, p: &Vector3<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Incremental convex hull. Points within `eps` (scaled by the point cloud's
/// extent) of the current hull are treated as interior. Fails with
/// [`Error::DegenerateBody`] when the points do not span 3-space.
pub fn convex_hull_3d(pts: &[Vector3<f64>], eps: f64) -> Result<Hull3> {
    if pts.len() < 4 {
        return Err(Error::DegenerateBody(format!(
            "{} points cannot span 3-space",
            pts.len()
        )));
    }
    if pts.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(Error::DegenerateBody("non-finite coordinate".into()));
    }
    let scale = pts
        .iter()
        .map(|p| (p - pts[0]).norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let tol = eps * scale;

    let [i0, i1, i2, i3] = initial_simplex(pts, tol)?;
    let mut faces: Vec<Option<Face>> = Vec::new();
    let centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(pts, tri);
        if f.height(&centroid) > 0.0 {
            f = Face::new(pts, [tri[0], tri[2], tri[1]]);
        }
        faces.push(Some(f));
    }
    // directed edge -> face owning it
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        let v = f.as_ref().unwrap().v;
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), fi);
        }
    }

    for (pi, p) in pts.iter().enumerate() {
        if [i0, i1, i2, i3].contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter_map(|(fi, f)| f.as_ref().filter(|f| f.height(p) > tol).map(|_| fi))
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &fi in &visible {
            let v = faces[fi].unwrap().v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let twin = edges[&(b, a)];
                if !visible.contains(&twin) {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            let v = faces[fi].unwrap().v;
            for k in 0..3 {
                edges.remove(&(v[k], v[(k + 1) % 3]));
            }
            faces[fi] = None;
        }
        for (a, b) in horizon {
            let f = Face::new(pts, [a, b, pi]);
            let fi = faces.len();
            faces.push(Some(f));
            edges.insert((a, b), fi);
            edges.insert((b, pi), fi);
            edges.insert((pi, a), fi);
        }
    }

    let faces: Vec<[usize; 3]> = faces.into_iter().flatten().map(|f| f.v).collect();
    let mut vertices: Vec<usize> = faces.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(Hull3 { vertices, faces })
}

fn initial_simplex(pts: &[Vector3<f64>], tol: f64) -> Result<[usize; 4]> {
    let degenerate = || Error::DegenerateBody("points do not span 3-space".into());
    let i0 = (0..pts.len())
        .min_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x))
        .unwrap();
    let i1 = argmax(pts, |p| (p - pts[i0]).norm());
    if (pts[i1] - pts[i0]).norm() <= tol {
        return Err(degenerate());
    }
    let dir = (pts[i1] - pts[i0]).normalize();
    let i2 = argmax(pts, |p| (p - pts[i0]).cross(&dir).norm());
    if (pts[i2] - pts[i0]).cross(&dir).norm() <= tol {
        return Err(degenerate());
    }
    let n = (pts[i1] - pts[i0]).cross(&(pts[i2] - pts[i0])).normalize();
    let i3 = argmax(pts, |p| n.dot(&(p - pts[i0])).abs());
    if n.dot(&(pts[i3] - pts[i0])).abs() <= tol {
        return Err(degenerate());
    }
    Ok([i0, i1, i2, i3])
}

fn argmax(pts: &[Vector3<f64>], f: impl Fn(&Vector3<f64>) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let v = f(p);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

/// Indices of the 2D convex hull vertices in counterclockwise order, starting
/// from the lexicographically smallest point. Collinear and duplicate points
/// (within `eps`) are dropped.
pub fn convex_hull_2d(pts: &[Vector2<f64>], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a]
            .x
            .total_cmp(&pts[b].x)
            .then(pts[a].y.total_cmp(&pts[b].y))
    });
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (pts[o], pts[a], pts[b]);
        (a - o).perp(&(b - o))
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
