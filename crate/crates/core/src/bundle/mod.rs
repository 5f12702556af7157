//! Moving dilation over grids and paths: complement fields, continuation,
//! loop holonomy and zero-locus obstruction scans.

pub mod complement;
pub mod holonomy;
pub mod obstruction;

pub use complement::{
    canonical_field, continue_complement, continue_with_refinement, det_normalized_field,
    max_principal_angle, refine_path, ComplementField, ComplementMethod, MAX_REFINE_DEPTH,
};
pub use holonomy::{loop_holonomy, reverse_loop, HolonomyClass, HolonomyReport, StepStatistics};
pub use obstruction::{sphere_obstruction, zero_locus_scan, ObstructionReport, ZeroHit};
