//! Moving Parseval frames on vector bundles.
//!
//! * [`frame`], [`dilation`], [`dimension`]: single-fiber frame algebra,
//!   dilation to an orthonormal basis, complement constructions and the
//!   dimension of the Parseval set.
//! * [`atlas`]: parameterized surfaces, sampled frame fields and the explicit
//!   sphere and band frames.
//! * [`bundle`]: complements over whole fields, continuation along paths,
//!   loop holonomy and obstruction scans.

pub mod atlas;
pub mod bundle;
pub mod dilation;
pub mod dimension;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod random;
pub mod tolerances;

pub use dilation::{
    canonical_complement, det_normalized_complement, dilate, fiber_projection, local_complement,
    project_frame, range_coordinates, stacked_residual, CanonicalComplement, ComplementProjector,
    DilationPair,
};
pub use dimension::{expected_parseval_dimension, parseval_tangent_dimension};
pub use error::{Error, Result};
pub use frame::{
    analysis, frame_spectrum, is_parseval, parseval_normalize, synthesis, Frame, FrameSpectrum,
    ParsevalCheck,
};
pub use tolerances::Tolerances;

pub use nalgebra::{DMatrix, DVector};
