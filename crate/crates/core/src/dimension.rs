//! Numerical tangent dimension of the set of Parseval frames P(k, n).

use nalgebra::DMatrix;

use crate::error::Result;
use crate::frame::{require_parseval, Frame};
use crate::linalg;
use crate::tolerances::Tolerances;

/// `kn − n(n+1)/2`.
pub fn expected_parseval_dimension(k: usize, n: usize) -> usize {
    k * n - n * (n + 1) / 2
}

/// Upper-triangular entries of `F·Fᵀ`, the coordinates of the frame-operator
/// map into symmetric n×n arrays.
fn operator_coordinates(f: &DMatrix<f64>) -> Vec<f64> {
    let s = f * f.transpose();
    let n = s.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for r in 0..n {
        for c in r..n {
            out.push(s[(r, c)]);
        }
    }
    out
}

/// Dimension of the level set of `F ↦ F·Fᵀ` through `frame`, measured as
/// `kn − rank(D)` where `D` is the central-difference differential over all
/// kn coordinates. At a regular point this is `kn − n(n+1)/2`.
pub fn parseval_tangent_dimension(
    frame: &Frame,
    step: f64,
    rank_tol: f64,
    tol: &Tolerances,
) -> Result<usize> {
    require_parseval(frame, tol.parseval)?;
    let (n, k) = (frame.n(), frame.k());
    let rows = n * (n + 1) / 2;
    let cols = n * k;
    let mut jac = DMatrix::zeros(rows, cols);
    let base = frame.matrix();
    for idx in 0..cols {
        let (r, c) = (idx % n, idx / n);
        let mut plus = base.clone();
        plus[(r, c)] += step;
        let mut minus = base.clone();
        minus[(r, c)] -= step;
        let fp = operator_coordinates(&plus);
        let fm = operator_coordinates(&minus);
        for (row, (a, b)) in fp.iter().zip(&fm).enumerate() {
            jac[(row, idx)] = (a - b) / (2.0 * step);
        }
    }
    Ok(cols - linalg::numerical_rank(&jac, rank_tol))
}
