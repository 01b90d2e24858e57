//! Scenes (an inner body inside an outer one), apex sampling on the outer
//! boundary, the η map and section field, and the end-to-end check of the
//! "congruent support cones force a ball" statement.

mod eta;
mod scene;
mod verify;

pub use eta::{
    eta_coverage, eta_map, min_angular_separation, section_field, EtaSample, SectionField,
    TaggedSection,
};
pub use scene::{
    load_scene, parse_scene, project_to_boundary, sample_boundary, BodySpec, SamplingSpec,
    SamplingStrategy, Scene, SceneConfig, SceneSpec,
};
pub use verify::{scene_cones, verify_scene, SectionSummary, Verdict, VerificationReport};
