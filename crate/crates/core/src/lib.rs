//! Support cones of convex bodies in 3-space: construction, congruence under
//! O(3), symmetry detection, and the sphere-topology checks (Poincaré–Hopf
//! sums, frame-field singularities) behind the "congruent support cones force
//! a ball" characterization, wired into an end-to-end scene verifier.

// `!(x > y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod congruence;
mod error;
pub mod geom;
pub mod harness;
pub mod symmetry;
pub mod topology;

#[cfg(test)]
mod testutil;

pub use cone::{support_cone, PlanarSection, SupportCone};
pub use congruence::{
    congruence_distance, pairwise_congruence_matrix, CongruenceConfig, CongruenceMatrix,
    CongruenceResult,
};
pub use harness::{load_scene, verify_scene, Scene, Verdict, VerificationReport};
pub use symmetry::{detect_symmetries, GroupOrder, SymmetryClass, SymmetryReport};
pub use topology::{icosphere, poincare_hopf_sum, two_sequence_limits, FieldKind, TriMesh};

pub use error::{Error, Result};
pub use geom::{hausdorff_distance, ConvexBody3, PlaneFrame, Point3, RigidMotion};
