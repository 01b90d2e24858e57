use std::collections::{BTreeMap, HashMap};

use nalgebra::Vector3;

use crate::error::{invalid, Result};
use crate::geom::hull::convex_hull_3d;
use crate::geom::off::OffMesh;
use crate::geom::{icosahedron_vertices, UNIT_TOL};

/// Closed, consistently outward-oriented triangulation of the unit sphere.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[usize; 3]>,
    /// Undirected edge `(lo, hi)` to its two triangles.
    edges: BTreeMap<(usize, usize), [usize; 2]>,
    /// Neighbors of each vertex, counterclockwise seen from outside.
    links: Vec<Vec<usize>>,
}

impl TriMesh {
    /// Validates unit vertices, a closed orientable surface and `χ = 2`.
    /// An inward orientation is flipped.
    pub fn new(vertices: Vec<Vector3<f64>>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.len() < 4 || triangles.len() < 4 {
            return Err(invalid("mesh needs at least 4 vertices and 4 triangles"));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !((v.norm() - 1.0).abs() <= UNIT_TOL) {
                return Err(invalid(format!("vertex {i} is not on the unit sphere")));
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(invalid(format!("triangle {t} has an out-of-range index")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(invalid(format!("triangle {t} repeats a vertex")));
            }
        }
        let volume: f64 = triangles
            .iter()
            .map(|t| vertices[t[0]].dot(&vertices[t[1]].cross(&vertices[t[2]])))
            .sum();
        if volume < 0.0 {
            for t in &mut triangles {
                t.swap(1, 2);
            }
        }

        // directed edge a→b to the vertex opposite it in its triangle
        let mut next: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, &[a, b, c]) in triangles.iter().enumerate() {
            for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
                if next.insert((p, q), r).is_some() {
                    return Err(invalid(format!(
                        "edge ({p}, {q}) is used twice with the same orientation"
                    )));
                }
                edges.entry((p.min(q), p.max(q))).or_default().push(t);
            }
        }
        let edges = edges
            .into_iter()
            .map(|(e, ts)| match ts[..] {
                [s, t] => Ok((e, [s, t])),
                _ => Err(invalid(format!(
                    "edge {e:?} bounds {} triangles, expected 2",
                    ts.len()
                ))),
            })
            .collect::<Result<BTreeMap<_, _>>>()?;

        let euler = vertices.len() as i64 - edges.len() as i64 + triangles.len() as i64;
        if euler != 2 {
            return Err(invalid(format!("Euler characteristic {euler}, expected 2")));
        }

        // for triangle (v, a, b) the link of v continues a → b
        let mut step: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices.len()];
        for (&(p, q), &r) in &next {
            step[r].push((p, q));
        }
        let mut links = Vec::with_capacity(vertices.len());
        for (v, pairs) in step.iter().enumerate() {
            let Some(&(start, _)) = pairs.iter().min() else {
                return Err(invalid(format!("vertex {v} is in no triangle")));
            };
            let succ: HashMap<usize, usize> = pairs.iter().copied().collect();
            let mut link = vec![start];
            let mut cur = succ[&start];
            while cur != start {
                if link.len() > pairs.len() {
                    return Err(invalid(format!("vertex {v} has a non-manifold link")));
                }
                link.push(cur);
                cur = *succ
                    .get(&cur)
                    .ok_or_else(|| invalid(format!("vertex {v} has an open link")))?;
            }
            if link.len() != pairs.len() {
                return Err(invalid(format!("vertex {v} has a non-manifold link")));
            }
            links.push(link);
        }
        Ok(Self {
            vertices,
            triangles,
            edges,
            links,
        })
    }

    /// Triangle mesh from an OFF file, with vertices radially projected onto
    /// the unit sphere.
    pub fn from_off(off: &OffMesh) -> Result<Self> {
        let vertices = off
            .vertices
            .iter()
            .map(|v| {
                let n = v.norm();
                if n > 0.0 && n.is_finite() {
                    Ok(v / n)
                } else {
                    Err(invalid("OFF vertex at the origin"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let triangles = off
            .faces
            .iter()
            .map(|f| match f[..] {
                [a, b, c] => Ok([a, b, c]),
                _ => Err(invalid(format!(
                    "face with {} vertices; triangles only",
                    f.len()
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, triangles)
    }

    pub fn to_off(&self) -> OffMesh {
        OffMesh {
            vertices: self.vertices.clone(),
            faces: self.triangles.iter().map(|t| t.to_vec()).collect(),
        }
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Triangles on each side of an edge, if it is one.
    pub fn edge_triangles(&self, a: usize, b: usize) -> Option<[usize; 2]> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` in counterclockwise order seen from outside.
    pub fn link(&self, v: usize) -> &[usize] {
        &self.links[v]
    }

    /// Vertex nearest to `p`.
    pub fn nearest_vertex(&self, p: &Vector3<f64>) -> usize {
        (0..self.vertices.len())
            .min_by(|&i, &j| {
                (self.vertices[i] - p)
                    .norm_squared()
                    .total_cmp(&(self.vertices[j] - p).norm_squared())
            })
            .expect("mesh has vertices")
    }
}

/// Icosahedron with each edge split into `2^level` parts, vertices pushed to
/// the unit sphere.
pub fn icosphere(level: u32) -> TriMesh {
    geodesic_sphere(1 << level)
}

/// Icosahedron with each face carrying a triangular grid of `frequency`
/// steps per edge, grid points projected radially onto the unit sphere.
pub fn geodesic_sphere(frequency: usize) -> TriMesh {
    assert!(frequency >= 1, "frequency must be positive");
    let corners = icosahedron_vertices();
    let hull = convex_hull_3d(&corners, 1e-9).expect("icosahedron hull");
    let f = frequency;
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    // grid points on edges and corners are shared between faces; key them
    // by their barycentric description on the sorted corner indices
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut point = |weights: [(usize, usize); 3], vs: &mut Vec<Vector3<f64>>| -> usize {
        let mut key: Vec<(usize, usize)> = weights.iter().copied().filter(|w| w.1 > 0).collect();
        key.sort_unstable();
        *index.entry(key).or_insert_with(|| {
            let p: Vector3<f64> = weights.iter().map(|&(c, w)| corners[c] * w as f64).sum();
            vs.push(p.normalize());
            vs.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(20 * f * f);
    for &[a, b, c] in &hull.faces {
        // grid[i][j]: weight i on b, j on c, the rest on a
        let grid: Vec<Vec<usize>> = (0..=f)
            .map(|i| {
                (0..=f - i)
                    .map(|j| point([(a, f - i - j), (b, i), (c, j)], &mut vertices))
                    .collect()
            })
            .collect();
        for i in 0..f {
            for j in 0..f - i {
                triangles.push([grid[i][j], grid[i + 1][j], grid[i][j + 1]]);
                if j + 1 < f - i {
                    triangles.push([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                }
            }
        }
    }
    TriMesh::new(vertices, triangles).expect("geodesic sphere is a valid sphere mesh")
}

impl TriMesh {
    /// Triangle containing the unit vector `u` (ties go to the lowest index).
    pub fn locate(&self, u: &Vector3<f64>) -> Option<usize> {
        self.triangles.iter().position(|&[a, b, c]| {
            let (a, b, c) = (&self.vertices[a], &self.vertices[b], &self.vertices[c]);
            u.dot(&a.cross(b)) >= 0.0 && u.dot(&b.cross(c)) >= 0.0 && u.dot(&c.cross(a)) >= 0.0
        })
    }
}
