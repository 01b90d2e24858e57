use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::congruence::CongruenceConfig;
use crate::error::{invalid, Error, Result};
use crate::geom::{fibonacci_sphere, matrix_from_rows, ConvexBody3, Point3, APEX_MARGIN};

/// Body description as it appears in scene files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
    },
    Ellipsoid {
        #[serde(default)]
        center: [f64; 3],
        semi_axes: [f64; 3],
        /// Rows of the rotation taking the principal axes to world axes.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orientation: Option<[[f64; 3]; 3]>,
    },
    Polytope {
        vertices: Vec<[f64; 3]>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody3> {
        match self {
            BodySpec::Ball { center, radius } => ConvexBody3::ball(Vector3::from(*center), *radius),
            BodySpec::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => ConvexBody3::ellipsoid(
                Vector3::from(*center),
                Vector3::from(*semi_axes),
                orientation
                    .as_ref()
                    .map_or_else(Matrix3::identity, matrix_from_rows),
            ),
            BodySpec::Polytope { vertices } => {
                let v: Vec<Point3> = vertices.iter().map(|p| Vector3::from(*p)).collect();
                ConvexBody3::polytope(&v)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    /// Fibonacci lattice; the seed has no effect.
    Fibonacci,
    /// Independent uniform directions drawn from the seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSpec {
    pub count: usize,
    pub seed: u64,
    pub strategy: SamplingStrategy,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            count: 50,
            seed: 0,
            strategy: SamplingStrategy::Fibonacci,
        }
    }
}

/// Pipeline settings. Unset tolerances follow the cone kind: 1e-6 for
/// polytopes, 1e-3 for sampled smooth bodies; the witness threshold defaults
/// to ten times the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_threshold: Option<f64>,
    pub samples_per_cone: usize,
    /// Run the continuity probe when the matrix alone is inconclusive.
    pub continuity_probe: bool,
    pub congruence: CongruenceConfig,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            tol: None,
            witness_threshold: None,
            samples_per_cone: crate::cone::DEFAULT_SAMPLES,
            continuity_probe: true,
            congruence: CongruenceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub inner: BodySpec,
    pub outer: BodySpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub config: SceneConfig,
    #[serde(default = "default_margin")]
    pub containment_margin: f64,
    /// Interior point of the inner body used as the origin for central
    /// projection; defaults to its centroid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 3]>,
}

fn default_margin() -> f64 {
    APEX_MARGIN
}

/// Inner body `M` strictly inside outer body `K`, with apexes sampled on
/// `bd K`.
#[derive(Debug, Clone)]
pub struct Scene {
    pub spec: SceneSpec,
    pub inner: ConvexBody3,
    pub outer: ConvexBody3,
    pub origin: Point3,
    apexes: Vec<Point3>,
}

/// Points on the inner body checked against the outer one.
const CONTAINMENT_SAMPLES: usize = 2000;

fn scene_invalid(reason: impl Into<String>, sample: Option<&Point3>) -> Error {
    Error::SceneInvalid {
        reason: reason.into(),
        sample: sample.map(|p| [p.x, p.y, p.z]),
    }
}

impl Scene {
    pub fn from_spec(spec: SceneSpec) -> Result<Self> {
        let margin = spec.containment_margin;
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(invalid(format!("containment margin {margin}")));
        }
        if spec.sampling.count < 2 {
            return Err(invalid("need at least 2 apexes"));
        }
        let inner = spec.inner.build()?;
        let outer = spec.outer.build()?;
        for p in inner.boundary_points(CONTAINMENT_SAMPLES) {
            if !(outer.signed_gap(&p) <= -margin) {
                return Err(scene_invalid(
                    "inner body is not inside the outer body",
                    Some(&p),
                ));
            }
        }
        let origin = spec.origin.map_or_else(|| inner.centroid(), Vector3::from);
        if !(inner.signed_gap(&origin) < 0.0) {
            return Err(scene_invalid(
                "origin is not interior to the inner body",
                Some(&origin),
            ));
        }
        let s = &spec.sampling;
        let apexes = sample_boundary(&outer, &origin, s.count, s.seed, s.strategy)?;
        for x in &apexes {
            if !(inner.signed_gap(x) >= margin) {
                return Err(scene_invalid("apex too close to the inner body", Some(x)));
            }
        }
        Ok(Self {
            spec,
            inner,
            outer,
            origin,
            apexes,
        })
    }

    pub fn apexes(&self) -> &[Point3] {
        &self.apexes
    }

    pub fn config(&self) -> &SceneConfig {
        &self.spec.config
    }

    /// Congruence tolerance in effect.
    pub fn tol(&self) -> f64 {
        self.spec.config.tol.unwrap_or(if self.inner.is_smooth() {
            self.spec.config.congruence.tol_sampled
        } else {
            self.spec.config.congruence.tol_polyhedral
        })
    }

    pub fn witness_threshold(&self) -> f64 {
        self.spec
            .config
            .witness_threshold
            .unwrap_or(10.0 * self.tol())
    }

    /// Congruence settings with the scene tolerance applied.
    pub fn congruence_config(&self) -> CongruenceConfig {
        let mut c = self.spec.config.congruence.clone();
        if let Some(t) = self.spec.config.tol {
            c.tol_polyhedral = t;
            c.tol_sampled = t;
        }
        c
    }

    /// Cone samples for smooth inner bodies.
    pub fn samples_per_cone(&self) -> usize {
        self.spec.config.samples_per_cone
    }
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let spec: SceneSpec =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scene: {e}")))?;
    Scene::from_spec(spec)
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    parse_scene(&std::fs::read_to_string(path)?)
}

/// Central projection of unit directions from `origin` onto `bd K`.
pub fn project_to_boundary(
    body: &ConvexBody3,
    origin: &Point3,
    dirs: &[Vector3<f64>],
) -> Result<Vec<Point3>> {
    if !(body.signed_gap(origin) < 0.0) {
        return Err(invalid("projection origin is not inside the body"));
    }
    dirs.iter()
        .map(|d| Ok(origin + d * body.ray_exit(origin, d)?))
        .collect()
}

/// `n` boundary points of `K`: a deterministic set of unit directions
/// projected from `origin`.
pub fn sample_boundary(
    body: &ConvexBody3,
    origin: &Point3,
    n: usize,
    seed: u64,
    strategy: SamplingStrategy,
) -> Result<Vec<Point3>> {
    if n < 2 {
        return Err(invalid("need at least 2 boundary samples"));
    }
    let dirs = match strategy {
        SamplingStrategy::Fibonacci => fibonacci_sphere(n),
        SamplingStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let v: Vector3<f64> = Vector3::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let len = v.norm();
                if len > 1e-6 {
                    out.push(v / len);
                }
            }
            out
        }
    };
    project_to_boundary(body, origin, &dirs)
}
