use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use crate::error::{invalid, Error, Result};
use crate::geom::{to_array, EPS_GEO};

const TANGENCY_TOL: f64 = 1e-10;

/// Per-vertex tangent vectors on a sphere mesh.
#[derive(Debug, Clone)]
pub struct TangentField<'m> {
    mesh: &'m TriMesh,
    vectors: Vec<Vector3<f64>>,
}

impl<'m> TangentField<'m> {
    /// Checks `⟨vector(v), v⟩ = 0` within 1e-10 at every vertex.
    pub fn new(mesh: &'m TriMesh, vectors: Vec<Vector3<f64>>) -> Result<Self> {
        if vectors.len() != mesh.vertices().len() {
            return Err(invalid(format!(
                "{} vectors for {} vertices",
                vectors.len(),
                mesh.vertices().len()
            )));
        }
        for (i, (w, v)) in vectors.iter().zip(mesh.vertices()).enumerate() {
            if !w.iter().all(|x| x.is_finite()) || !(w.dot(v).abs() <= TANGENCY_TOL) {
                return Err(invalid(format!("vector at vertex {i} is not tangent")));
            }
        }
        Ok(Self { mesh, vectors })
    }

    /// Tangential projection of an ambient field.
    pub fn from_fn(mesh: &'m TriMesh, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Self {
        let vectors = mesh
            .vertices()
            .iter()
            .map(|v| {
                let w = f(v);
                w - v * w.dot(v)
            })
            .collect();
        Self { mesh, vectors }
    }

    pub fn mesh(&self) -> &TriMesh {
        self.mesh
    }

    pub fn vectors(&self) -> &[Vector3<f64>] {
        &self.vectors
    }
}

/// Named test fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `u ↦ e₃ × u`: rotation about the polar axis.
    Rotational,
    /// Tangential part of the constant field `e₃`.
    Projected,
    /// Tangential part of a random quadratic polynomial field.
    Poly,
}

impl FieldKind {
    pub fn build<'m>(self, mesh: &'m TriMesh, seed: u64) -> TangentField<'m> {
        match self {
            FieldKind::Rotational => TangentField::from_fn(mesh, |u| Vector3::z().cross(u)),
            FieldKind::Projected => TangentField::from_fn(mesh, |_| Vector3::z()),
            FieldKind::Poly => {
                let p = random_quadratic(seed);
                TangentField::from_fn(mesh, move |u| p(u))
            }
        }
    }
}

/// Ambient map `R³ → R³` whose components are quadratics with standard
/// normal coefficients.
pub fn random_quadratic(seed: u64) -> impl Fn(&Vector3<f64>) -> Vector3<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let constant = Vector3::from_fn(|_, _| draw());
    let linear = Matrix3::from_fn(|_, _| draw());
    let quadratic: [Matrix3<f64>; 3] = std::array::from_fn(|_| Matrix3::from_fn(|_, _| draw()));
    move |u| constant + linear * u + Vector3::from_fn(|k, _| u.dot(&(quadratic[k] * u)))
}

/// Ambient vector at sample point `p` carried to the tangent plane at `v`
/// by the rotation taking `p` to `v` along their great circle.
fn transport(w: &Vector3<f64>, p: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    // Rodrigues with k = p × v, sin θ = |k|, cos θ = p·v
    let k = p.cross(v);
    let c = p.dot(v);
    w * c + k.cross(w) + k * (k.dot(w) / (1.0 + c))
}

/// Steps above this are bisected before they are summed.
const MAX_STEP: f64 = PI / 4.0;
const MAX_DEPTH: u32 = 24;

/// Winding number of the field around `v`, counted on the loop through the
/// midpoints of the edges at `v` and the centroids of the triangles at `v`.
/// These loops bound the cells of the dual tiling, so the indices of all
/// vertices add up to the Euler characteristic. Field values on the loop are
/// averages of the vertex vectors, interpolated linearly along each loop
/// segment; segments are bisected until the angle steps are small, so two
/// cells sharing a segment follow the same continuous field along it even on
/// coarse meshes.
pub fn vertex_index(field: &TangentField<'_>, v: usize) -> Result<i32> {
    let mesh = field.mesh;
    let verts = mesh.vertices();
    let vecs = &field.vectors;
    let Some(&center) = verts.get(v) else {
        return Err(invalid(format!("vertex {v} out of range")));
    };
    let e1 = crate::geom::any_orthonormal(&center);
    let e2 = center.cross(&e1);
    let link = mesh.link(v);
    let d = link.len();
    let mut samples = Vec::with_capacity(2 * d);
    for k in 0..d {
        let (a, b) = (link[k], link[(k + 1) % d]);
        samples.push(((center + verts[a]).normalize(), 0.5 * (vecs[v] + vecs[a])));
        samples.push((
            (center + verts[a] + verts[b]).normalize(),
            (vecs[v] + vecs[a] + vecs[b]) / 3.0,
        ));
    }
    let angle = |p: &Vector3<f64>, w: &Vector3<f64>| -> Result<f64> {
        let t = transport(w, p, &center);
        let (x, y) = (t.dot(&e1), t.dot(&e2));
        if x.hypot(y) <= EPS_GEO {
            return Err(Error::IndeterminateIndex { vertex: v });
        }
        Ok(y.atan2(x))
    };
    let mut total = 0.0;
    for k in 0..samples.len() {
        let (p0, w0) = samples[k];
        let (p1, w1) = samples[(k + 1) % samples.len()];
        let at = |s: f64| -> Result<f64> {
            let p = (p0 * (1.0 - s) + p1 * s).normalize();
            angle(&p, &(w0 * (1.0 - s) + w1 * s))
        };
        // (s0, θ0, s1, θ1, depth)
        let mut stack = vec![(0.0, at(0.0)?, 1.0, at(1.0)?, 0)];
        while let Some((s0, t0, s1, t1, depth)) = stack.pop() {
            let mut step = (t1 - t0).rem_euclid(TAU);
            if step > PI {
                step -= TAU;
            }
            if step.abs() <= MAX_STEP {
                total += step;
                continue;
            }
            if depth == MAX_DEPTH {
                // the field turns by a finite angle over a vanishing arc: a zero
                return Err(Error::IndeterminateIndex { vertex: v });
            }
            let sm = 0.5 * (s0 + s1);
            let tm = at(sm)?;
            stack.push((sm, tm, s1, t1, depth + 1));
            stack.push((s0, t0, sm, tm, depth + 1));
        }
    }
    Ok((total / TAU).round() as i32)
}

/// Vertex with nonzero index.
#[derive(Debug, Clone, Serialize)]
pub struct SingularVertex {
    pub vertex: usize,
    #[serde(serialize_with = "ser_point")]
    pub position: Vector3<f64>,
    pub index: i32,
}

fn ser_point<S: serde::Serializer>(v: &Vector3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_array(v).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub vertices: usize,
    pub triangles: usize,
    pub singular: Vec<SingularVertex>,
    pub sum: i32,
}

pub fn index_report(field: &TangentField<'_>) -> Result<IndexReport> {
    let mesh = field.mesh;
    let mut singular = Vec::new();
    for v in 0..mesh.vertices().len() {
        let index = vertex_index(field, v)?;
        if index != 0 {
            singular.push(SingularVertex {
                vertex: v,
                position: mesh.vertices()[v],
                index,
            });
        }
    }
    let sum = singular.iter().map(|s| s.index).sum();
    Ok(IndexReport {
        vertices: mesh.vertices().len(),
        triangles: mesh.triangles().len(),
        singular,
        sum,
    })
}

/// Sum of all vertex indices; 2 for any field without zeros on the loops.
pub fn poincare_hopf_sum(field: &TangentField<'_>) -> Result<i32> {
    Ok(index_report(field)?.sum)
}
