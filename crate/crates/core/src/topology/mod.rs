//! Sphere topology behind the continuity argument: Poincaré–Hopf index sums
//! of tangent fields on triangulated spheres, and the unavoidable
//! discontinuity of frame fields `u ↦ Ω_u` with `Ω_u·base = u`.

mod field;
mod frame;
mod mesh;

pub use field::{
    index_report, poincare_hopf_sum, vertex_index, FieldKind, IndexReport, SingularVertex,
    TangentField,
};
pub use frame::{
    meridian_frame, two_sequence_limits, FrameField, MeridianLimit, TwoSequenceLimits,
};
pub use mesh::{geodesic_sphere, icosphere, TriMesh};
