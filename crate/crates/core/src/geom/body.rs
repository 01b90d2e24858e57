use nalgebra::{Matrix3, Vector3};

use super::hull::convex_hull_3d;
use super::{fibonacci_sphere, orthogonality_defect, Point3, RigidMotion, EPS_GEO};
use crate::error::{invalid, Error, Result};

/// Supporting half-space `normal·p ≤ offset` of a polytope facet.
#[derive(Debug, Clone, Copy)]
pub struct Facet {
    pub normal: Vector3<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    facets: Vec<Facet>,
}

impl Polytope {
    /// Hull of `points`. Non-extreme input points are discarded.
    pub fn new(points: &[Point3]) -> Result<Self> {
        let hull = convex_hull_3d(points, EPS_GEO)?;
        let mut remap = vec![usize::MAX; points.len()];
        let vertices: Vec<Point3> = hull
            .vertices
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                remap[i] = k;
                points[i]
            })
            .collect();
        let faces: Vec<[usize; 3]> = hull
            .faces
            .iter()
            .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
            .collect();
        let facets = faces
            .iter()
            .map(|f| {
                let n = (vertices[f[1]] - vertices[f[0]])
                    .cross(&(vertices[f[2]] - vertices[f[0]]))
                    .normalize();
                Facet {
                    normal: n,
                    offset: n.dot(&vertices[f[0]]),
                }
            })
            .collect();
        Ok(Self {
            vertices,
            faces,
            facets,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Facet of largest signed height `normal·x - offset`.
    pub fn most_violated_facet(&self, x: &Point3) -> (Facet, f64) {
        self.facets
            .iter()
            .map(|f| (*f, f.normal.dot(x) - f.offset))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("polytope has facets")
    }
}

/// Ellipsoid `{c + R·diag(s)·z : |z| ≤ 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: Point3,
    semi_axes: Vector3<f64>,
    orientation: Matrix3<f64>,
}

impl Ellipsoid {
    pub fn center(&self) -> &Point3 {
        &self.center
    }

    pub fn semi_axes(&self) -> &Vector3<f64> {
        &self.semi_axes
    }

    /// Columns are the principal directions.
    pub fn orientation(&self) -> &Matrix3<f64> {
        &self.orientation
    }
}

/// A full-dimensional convex body in 3-space.
#[derive(Debug, Clone)]
pub enum ConvexBody3 {
    Polytope(Polytope),
    Ball { center: Point3, radius: f64 },
    Ellipsoid(Ellipsoid),
}

impl ConvexBody3 {
    pub fn polytope(points: &[Point3]) -> Result<Self> {
        Ok(Self::Polytope(Polytope::new(points)?))
    }

    pub fn ball(center: Point3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateBody(format!("ball radius {radius}")));
        }
        if !center.iter().all(|x| x.is_finite()) {
            return Err(invalid("non-finite ball center"));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn ellipsoid(
        center: Point3,
        semi_axes: Vector3<f64>,
        orientation: Matrix3<f64>,
    ) -> Result<Self> {
        if !semi_axes.iter().all(|s| *s > 0.0 && s.is_finite()) {
            return Err(Error::DegenerateBody(format!(
                "ellipsoid semi-axes {:?}",
                semi_axes.as_slice()
            )));
        }
        if !(orthogonality_defect(&orientation) <= 1e-12) {
            return Err(invalid("ellipsoid orientation is not orthogonal"));
        }
        Ok(Self::Ellipsoid(Ellipsoid {
            center,
            semi_axes,
            orientation,
        }))
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, Self::Polytope(_))
    }

    /// Vertex centroid for polytopes, center otherwise.
    pub fn centroid(&self) -> Point3 {
        match self {
            Self::Polytope(p) => p.vertices.iter().sum::<Vector3<f64>>() / p.vertices.len() as f64,
            Self::Ball { center, .. } => *center,
            Self::Ellipsoid(e) => e.center,
        }
    }

    /// `(center, A)` with the body equal to `{center + A·z : |z| ≤ 1}`.
    pub fn affine_frame(&self) -> Option<(Point3, Matrix3<f64>)> {
        match self {
            Self::Polytope(_) => None,
            Self::Ball { center, radius } => Some((*center, Matrix3::identity() * *radius)),
            Self::Ellipsoid(e) => Some((
                e.center,
                e.orientation * Matrix3::from_diagonal(&e.semi_axes),
            )),
        }
    }

    /// Support function `h(u) = max_{y∈M} ⟨u, y⟩`.
    pub fn support(&self, u: &Vector3<f64>) -> f64 {
        match self {
            Self::Polytope(p) => p
                .vertices
                .iter()
                .map(|v| v.dot(u))
                .fold(f64::NEG_INFINITY, f64::max),
            _ => {
                let (c, a) = self.affine_frame().unwrap();
                u.dot(&c) + (a.transpose() * u).norm()
            }
        }
    }

    /// Signed separation of `x` from the body: a lower bound on the distance
    /// when positive, and minus a lower bound on the depth when negative.
    /// Exact for balls, and for polytopes whenever the nearest boundary point
    /// lies in a facet interior.
    pub fn signed_gap(&self, x: &Point3) -> f64 {
        match self {
            Self::Polytope(p) => p.most_violated_facet(x).1,
            Self::Ball { center, radius } => (x - center).norm() - radius,
            Self::Ellipsoid(e) => {
                let z = self.to_unit_ball(x);
                (z.norm() - 1.0) * e.semi_axes.min()
            }
        }
    }

    /// Coordinates in which the smooth body is the unit ball.
    fn to_unit_ball(&self, x: &Point3) -> Vector3<f64> {
        match self {
            Self::Ellipsoid(e) => {
                let local = e.orientation.transpose() * (x - e.center);
                local.component_div(&e.semi_axes)
            }
            Self::Ball { center, radius } => (x - center) / *radius,
            Self::Polytope(_) => unreachable!(),
        }
    }

    /// Distance `t > 0` along the ray `origin + t·dir` to the boundary, for
    /// an origin inside the body.
    pub fn ray_exit(&self, origin: &Point3, dir: &Vector3<f64>) -> Result<f64> {
        if self.signed_gap(origin) >= 0.0 {
            return Err(invalid("ray origin is not inside the body"));
        }
        match self {
            Self::Polytope(p) => {
                let mut t_exit = f64::INFINITY;
                for f in &p.facets {
                    let rate = f.normal.dot(dir);
                    if rate > 0.0 {
                        t_exit = t_exit.min((f.offset - f.normal.dot(origin)) / rate);
                    }
                }
                if t_exit.is_finite() {
                    Ok(t_exit)
                } else {
                    Err(invalid("ray does not leave the polytope"))
                }
            }
            _ => {
                let (c, a) = self.affine_frame().unwrap();
                let inv = a
                    .try_inverse()
                    .ok_or_else(|| Error::Numerical("singular ellipsoid frame".into()))?;
                let o = inv * (origin - c);
                let d = inv * dir;
                // |o + t d|² = 1, t > 0
                let qa = d.norm_squared();
                let qb = o.dot(&d);
                let qc = o.norm_squared() - 1.0;
                let disc = qb * qb - qa * qc;
                Ok((-qb + disc.sqrt()) / qa)
            }
        }
    }

    /// Boundary points: polytope vertices, or `n` Fibonacci-distributed
    /// surface points of a smooth body.
    pub fn boundary_points(&self, n: usize) -> Vec<Point3> {
        match self {
            Self::Polytope(p) => p.vertices.clone(),
            _ => {
                let (c, a) = self.affine_frame().unwrap();
                fibonacci_sphere(n).iter().map(|u| c + a * u).collect()
            }
        }
    }

    /// Image of the body under a rigid motion.
    pub fn transformed(&self, phi: &RigidMotion) -> Result<Self> {
        Ok(match self {
            Self::Polytope(p) => {
                let v: Vec<Point3> = p.vertices.iter().map(|v| phi.apply(v)).collect();
                Self::polytope(&v)?
            }
            Self::Ball { center, radius } => Self::ball(phi.apply(center), *radius)?,
            Self::Ellipsoid(e) => Self::ellipsoid(
                phi.apply(&e.center),
                e.semi_axes,
                phi.omega() * e.orientation,
            )?,
        })
    }
}
