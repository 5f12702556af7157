use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every operation. All fields can be
/// overridden; `Default` gives the values the test suites are pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Frobenius bound on `F·Fᵀ − I` for a frame to count as Parseval.
    pub parseval: f64,
    /// Bound for orthogonality certificates of constructed arrays.
    pub orthogonality: f64,
    /// Central-difference step.
    pub fd_step: f64,
    /// Singular values below `rank * σ_max` are treated as zero.
    pub rank: f64,
    /// A Gram-Schmidt pass is repeated when the leftover overlap exceeds this.
    pub reorthogonalize: f64,
    /// Residual norm below which a Gram-Schmidt pivot is considered singular.
    pub singular_pivot: f64,
    /// `‖H − I‖_F` above which holonomy is classified nontrivial.
    pub holonomy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            parseval: 1e-8,
            orthogonality: 1e-10,
            fd_step: 1e-5,
            rank: 1e-6,
            reorthogonalize: 1e-12,
            singular_pivot: 1e-8,
            holonomy: 0.1,
        }
    }
}
