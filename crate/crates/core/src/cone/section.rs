use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use crate::geom::{PlaneFrame, Point3, RigidMotion};

/// A convex polygon, counterclockwise in the 2D coordinates of its frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarSection {
    frame: PlaneFrame,
    #[serde(serialize_with = "ser_polygon")]
    polygon: Vec<Vector2<f64>>,
}

fn ser_polygon<S: serde::Serializer>(
    p: &[Vector2<f64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|q| [q.x, q.y]))
}

impl PlanarSection {
    /// Reorders `polygon` counterclockwise if needed.
    pub fn new(frame: PlaneFrame, mut polygon: Vec<Vector2<f64>>) -> Self {
        if signed_area(&polygon) < 0.0 {
            polygon.reverse();
        }
        Self { frame, polygon }
    }

    pub fn frame(&self) -> &PlaneFrame {
        &self.frame
    }

    pub fn polygon(&self) -> &[Vector2<f64>] {
        &self.polygon
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.polygon)
    }

    pub fn world_vertices(&self) -> Vec<Point3> {
        self.polygon
            .iter()
            .map(|q| self.frame.to_world(q))
            .collect()
    }

    /// Unit normal of the section plane (toward the apex it was cut from).
    pub fn normal(&self) -> Vector3<f64> {
        *self.frame.normal()
    }

    pub fn transformed(&self, phi: &RigidMotion) -> PlanarSection {
        let (frame, flipped) = self.frame.transformed(phi);
        let polygon = if flipped {
            self.polygon
                .iter()
                .map(|q| Vector2::new(q.x, -q.y))
                .collect()
        } else {
            self.polygon.clone()
        };
        PlanarSection::new(frame, polygon)
    }

    /// Whether the polygon is convex (left turns only, up to `eps`).
    pub fn is_convex(&self, eps: f64) -> bool {
        let n = self.polygon.len();
        (0..n).all(|i| {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % n];
            let c = self.polygon[(i + 2) % n];
            (b - a).perp(&(c - b)) >= -eps
        })
    }
}

fn signed_area(p: &[Vector2<f64>]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i].perp(&p[(i + 1) % n])).sum::<f64>() / 2.0
}
