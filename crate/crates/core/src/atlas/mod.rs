//! Parameterized surfaces, sampled frame fields and the explicit moving
//! frames built on them.

pub mod field;
pub mod moving;
pub mod surface;

pub use field::{FieldSample, FrameField, ParamGrid, ParsevalSummary};
pub use moving::{
    band_field, band_frame, identification_residual, project_ambient_field,
    projected_vector_samples, sample_band, sphere_frame, tangent_projector, ProjectedField,
};
pub use surface::{
    builtin_surface, ChartFn, Domain, DonutTorus, EdgeGluing, EdgeSegment, FlatPlane, FlatTorus,
    GluedSquare, Surface, UnitSphere,
};
