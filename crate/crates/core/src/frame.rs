//! Finite frames in Rⁿ and their basic algebra.
//!
//! A [`Frame`] of k vectors in Rⁿ is stored as the n×k synthesis array whose
//! i-th column is fᵢ. A frame is Parseval exactly when the rows of that array
//! are orthonormal, i.e. `F·Fᵀ = Iₙ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// An ordered list of `k` vectors in `n`-dimensional Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    synthesis: DMatrix<f64>,
}

impl Frame {
    /// Builds a frame from its n×k synthesis array (columns are the vectors).
    pub fn from_matrix(synthesis: DMatrix<f64>) -> Result<Self> {
        if synthesis.nrows() == 0 || synthesis.ncols() == 0 {
            return Err(Error::InvalidFrame(format!(
                "need n >= 1 and k >= 1, got n = {}, k = {}",
                synthesis.nrows(),
                synthesis.ncols()
            )));
        }
        if synthesis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidFrame("non-finite coordinate".into()));
        }
        Ok(Self { synthesis })
    }

    /// Builds a frame from its vectors, each of dimension `n`.
    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let k = columns.len();
        let m = DMatrix::from_fn(n, k, |r, c| columns[c][r]);
        Self::from_matrix(m)
    }

    /// Builds a frame from the rows of its synthesis array.
    pub fn from_rows(k: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, found: bad.len() });
        }
        let m = DMatrix::from_fn(rows.len(), k, |r, c| rows[r][c]);
        Self::from_matrix(m)
    }

    /// The frame of `k` zero-dimensional vectors: the complement of an
    /// orthonormal basis.
    pub fn empty(k: usize) -> Self {
        Self { synthesis: DMatrix::zeros(0, k) }
    }

    /// Standard basis of Rⁿ.
    pub fn standard_basis(n: usize) -> Self {
        Self { synthesis: DMatrix::identity(n, n) }
    }

    pub(crate) fn from_matrix_unchecked(synthesis: DMatrix<f64>) -> Self {
        Self { synthesis }
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.synthesis.nrows()
    }

    /// Number of vectors.
    pub fn k(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.synthesis
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.synthesis
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.synthesis.column(i).into_owned()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.k())
            .map(|i| self.synthesis.column(i).iter().cloned().collect())
            .collect()
    }

    /// Gram array `FᵀF` (k×k), entries ⟨fᵢ, fⱼ⟩.
    pub fn gram(&self) -> DMatrix<f64> {
        self.synthesis.transpose() * &self.synthesis
    }
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    n: usize,
    k: usize,
    columns: Vec<Vec<f64>>,
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameRepr { n: self.n(), k: self.k(), columns: self.columns() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FrameRepr::deserialize(d)?;
        if repr.columns.len() != repr.k {
            return Err(D::Error::custom(format!(
                "k = {} but {} columns given",
                repr.k,
                repr.columns.len()
            )));
        }
        if repr.n == 0 {
            if repr.columns.iter().any(|c| !c.is_empty()) {
                return Err(D::Error::custom("n = 0 frame with non-empty columns"));
            }
            return Ok(Frame::empty(repr.k));
        }
        Frame::from_columns(repr.n, &repr.columns).map_err(D::Error::custom)
    }
}

/// Frame operator `S_F = F·Fᵀ` with its extreme eigenvalues, the optimal
/// frame bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpectrum {
    pub operator: DMatrix<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Outcome of a Parseval test; the residual is reported either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    pub parseval: bool,
    pub residual: f64,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Coefficient map `x ↦ (⟨x, fᵢ⟩)ᵢ`.
pub fn analysis(frame: &Frame, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(frame.n(), x.len())?;
    Ok(frame.matrix().tr_mul(x))
}

/// `c ↦ ∑ cᵢ fᵢ`, the adjoint of [`analysis`].
pub fn synthesis(frame: &Frame, c: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(frame.k(), c.len())?;
    Ok(frame.matrix() * c)
}

pub fn frame_spectrum(frame: &Frame) -> FrameSpectrum {
    let operator = frame_operator(frame);
    if operator.is_empty() {
        return FrameSpectrum { operator, lower: 0.0, upper: 0.0 };
    }
    let eig = SymmetricEigen::new(operator.clone());
    let lower = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let upper = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    FrameSpectrum { operator, lower, upper }
}

pub(crate) fn frame_operator(frame: &Frame) -> DMatrix<f64> {
    let f = frame.matrix();
    f * f.transpose()
}

/// `‖F·Fᵀ − Iₙ‖_F ≤ tol`.
pub fn is_parseval(frame: &Frame, tol: f64) -> ParsevalCheck {
    let residual = linalg::row_orthonormality_residual(frame.matrix());
    ParsevalCheck { parseval: residual <= tol, residual }
}

pub(crate) fn require_parseval(frame: &Frame, tol: f64) -> Result<()> {
    let check = is_parseval(frame, tol);
    if !check.parseval {
        return Err(Error::NotParseval { residual: check.residual });
    }
    Ok(())
}

/// Maps a spanning frame onto the Parseval frame `(S_F^{-1/2} fᵢ)`.
///
/// Fails with [`Error::RankDeficient`] when the smallest eigenvalue of the
/// frame operator is at or below `tol`.
pub fn parseval_normalize(frame: &Frame, tol: f64) -> Result<Frame> {
    let s = frame_operator(frame);
    let root = linalg::inverse_sqrt_spd(&s, tol)?;
    Frame::from_matrix(root * frame.matrix())
}
