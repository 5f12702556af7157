//! Single-fiber dilation: completing a Parseval frame `F` (n×k) with a
//! complement `G` ((k−n)×k) so that the stacked k×k array `[F; G]` is
//! orthogonal, and the related projector constructions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{require_parseval, Frame};
use crate::linalg;
use crate::tolerances::Tolerances;

/// A Parseval frame together with a complement frame whose stacked rows form
/// an orthogonal k×k array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationPair {
    #[serde(flatten)]
    pub base: Frame,
    pub complement: Frame,
    /// `max(‖MMᵀ − I‖_F, ‖MᵀM − I‖_F)` for the stacked array `M`.
    pub residual: f64,
}

impl DilationPair {
    /// The stacked k×k array `[base; complement]`. Its columns are fᵢ ⊕ gᵢ.
    pub fn stacked(&self) -> DMatrix<f64> {
        stack(&self.base, &self.complement)
    }
}

pub(crate) fn stack(top: &Frame, bottom: &Frame) -> DMatrix<f64> {
    let k = top.k();
    let (n, m) = (top.n(), bottom.n());
    let mut out = DMatrix::zeros(n + m, k);
    out.rows_mut(0, n).copy_from(top.matrix());
    out.rows_mut(n, m).copy_from(bottom.matrix());
    out
}

/// Orthogonality residual of a square stacked array, both row and column
/// Gram deviations.
pub fn stacked_residual(top: &Frame, bottom: &Frame) -> f64 {
    let m = stack(top, bottom);
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    linalg::row_orthonormality_residual(&m).max(linalg::column_orthonormality_residual(&m))
}

fn check_complement_shape(base: &Frame, complement: &Frame) -> Result<()> {
    if complement.k() != base.k() {
        return Err(Error::DimensionMismatch { expected: base.k(), found: complement.k() });
    }
    if base.n() + complement.n() != base.k() {
        return Err(Error::BadShape(format!(
            "complement of a {}x{} frame must have {} rows, has {}",
            base.n(),
            base.k(),
            base.k() - base.n().min(base.k()),
            complement.n()
        )));
    }
    Ok(())
}

fn require_frame_dims(frame: &Frame) -> Result<()> {
    if frame.k() < frame.n() {
        return Err(Error::BadShape(format!(
            "a Parseval frame needs k >= n, got n = {}, k = {}",
            frame.n(),
            frame.k()
        )));
    }
    Ok(())
}

/// Dilates a Parseval frame to an orthonormal basis of Rᵏ.
///
/// The base rows are copied verbatim. The complement comes from the pivoted
/// standard-basis completion in [`linalg::pivoted_completion`], so the result
/// is deterministic.
pub fn dilate(frame: &Frame, tol: &Tolerances) -> Result<DilationPair> {
    require_frame_dims(frame)?;
    require_parseval(frame, tol.parseval)?;
    let complement = if frame.k() == frame.n() {
        Frame::empty(frame.k())
    } else {
        Frame::from_matrix_unchecked(linalg::pivoted_completion(frame.matrix(), tol)?)
    };
    let residual = stacked_residual(frame, &complement);
    if residual > tol.parseval {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(DilationPair { base: frame.clone(), complement, residual })
}

/// The Gram array of a Parseval frame and the projector onto its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementProjector {
    /// `FᵀF`, the projector onto the row space of `F`.
    pub gram: DMatrix<f64>,
    /// `I_k − FᵀF`.
    pub kernel_projector: DMatrix<f64>,
}

impl ComplementProjector {
    pub fn from_frame(frame: &Frame) -> Self {
        let gram = frame.gram();
        let k = gram.nrows();
        let kernel_projector = DMatrix::identity(k, k) - &gram;
        Self { gram, kernel_projector }
    }

    /// `‖G² − G‖_F`.
    pub fn gram_idempotency_residual(&self) -> f64 {
        (&self.gram * &self.gram - &self.gram).norm()
    }

    pub fn kernel_rank(&self) -> f64 {
        self.kernel_projector.trace()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalComplement {
    pub projector: ComplementProjector,
    /// Columns `P·eᵢ`: a Parseval frame for `ker F`, in Rᵏ coordinates.
    pub frame: Frame,
    /// Largest deviation `|⟨θx, θy⟩ − ⟨x, y⟩|` over pairs of fiber basis
    /// vectors, where θ is the analysis map.
    pub isometry_residual: f64,
}

/// Kernel-projector complement of a Parseval frame.
pub fn canonical_complement(frame: &Frame, tol: &Tolerances) -> Result<CanonicalComplement> {
    require_frame_dims(frame)?;
    require_parseval(frame, tol.parseval)?;
    let projector = ComplementProjector::from_frame(frame);
    let frame_out = Frame::from_matrix_unchecked(projector.kernel_projector.clone());
    // ⟨θx, θy⟩ is bilinear, so basis pairs determine it completely
    let n = frame.n();
    let mut isometry_residual: f64 = 0.0;
    for a in 0..n {
        let ta = frame.matrix().row(a).transpose();
        for b in a..n {
            let tb = frame.matrix().row(b).transpose();
            let expected = if a == b { 1.0 } else { 0.0 };
            isometry_residual = isometry_residual.max((ta.dot(&tb) - expected).abs());
        }
    }
    Ok(CanonicalComplement { projector, frame: frame_out, isometry_residual })
}

/// Gram-Schmidt complement of `g` seeded by a reference dilation
/// `[f_ref; h_ref]`: orthonormalizes the rows of `[g; h_ref]` with the rows
/// of `g` held fixed and returns the new bottom block.
///
/// Returns `h_ref` unchanged (to rounding) when `g == f_ref`. Fails with
/// [`Error::SingularSeed`] once `g` is too far from `f_ref` for the seed to
/// stay independent.
pub fn local_complement(
    g: &Frame,
    f_ref: &Frame,
    h_ref: &Frame,
    tol: &Tolerances,
) -> Result<Frame> {
    if g.n() != f_ref.n() {
        return Err(Error::DimensionMismatch { expected: f_ref.n(), found: g.n() });
    }
    if g.k() != f_ref.k() {
        return Err(Error::DimensionMismatch { expected: f_ref.k(), found: g.k() });
    }
    check_complement_shape(f_ref, h_ref)?;
    require_parseval(g, tol.parseval)?;
    let seed_residual = stacked_residual(f_ref, h_ref);
    if seed_residual > tol.parseval {
        return Err(Error::NotOrthonormal { residual: seed_residual });
    }
    if h_ref.n() == 0 {
        return Ok(Frame::empty(g.k()));
    }
    let h = linalg::orthonormalize_after(g.matrix(), h_ref.matrix(), tol)?;
    Ok(Frame::from_matrix_unchecked(h))
}

/// The unique unit row `g` with `[F; g]` orthogonal and `det[F; g] = +1`,
/// determinants taken in the standard basis of Rᵏ. Requires `k = n + 1`.
pub fn det_normalized_complement(frame: &Frame, tol: &Tolerances) -> Result<Frame> {
    if frame.k() != frame.n() + 1 {
        return Err(Error::BadShape(format!(
            "det-normalized complement needs k = n + 1, got n = {}, k = {}",
            frame.n(),
            frame.k()
        )));
    }
    let pair = dilate(frame, tol)?;
    let det = pair.stacked().determinant();
    let mut g = pair.complement.into_matrix();
    if det < 0.0 {
        g.neg_mut();
    }
    Ok(Frame::from_matrix_unchecked(g))
}

/// Projects an orthonormal basis by a symmetric idempotent `projector`.
/// The result is a Parseval frame for the range of the projector; see
/// [`range_coordinates`].
pub fn project_frame(onb: &Frame, projector: &DMatrix<f64>, tol: &Tolerances) -> Result<Frame> {
    if onb.k() != onb.n() {
        return Err(Error::NotOrthonormal { residual: f64::INFINITY });
    }
    let onb_residual = linalg::row_orthonormality_residual(onb.matrix());
    if onb_residual > tol.parseval {
        return Err(Error::NotOrthonormal { residual: onb_residual });
    }
    if projector.nrows() != onb.n() || projector.ncols() != onb.n() {
        return Err(Error::DimensionMismatch { expected: onb.n(), found: projector.nrows() });
    }
    let residual = linalg::projector_residual(projector);
    if residual > tol.parseval {
        return Err(Error::NotIdempotent { residual });
    }
    Frame::from_matrix(projector * onb.matrix())
}

/// Re-expresses a frame lying in the range of `projector` in an orthonormal
/// basis of that range.
pub fn range_coordinates(frame: &Frame, projector: &DMatrix<f64>) -> Frame {
    let basis = linalg::projector_range(projector);
    if basis.ncols() == 0 {
        return Frame::empty(frame.k());
    }
    Frame::from_matrix_unchecked(basis.tr_mul(frame.matrix()))
}

/// The fiber projection `P₁: Rᵏ → Rⁿ`, `y ↦ F·y`. For a Parseval frame it
/// sends the i-th standard basis vector to fᵢ.
pub fn fiber_projection(frame: &Frame, y: &DVector<f64>) -> Result<DVector<f64>> {
    crate::frame::synthesis(frame, y)
}
