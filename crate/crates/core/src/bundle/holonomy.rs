//! Loop holonomy of continued complements.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::atlas::field::FrameField;
use crate::bundle::complement::{continue_with_refinement, ComplementField};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum HolonomyClass {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepStatistics {
    pub max_step: f64,
    pub mean_step: f64,
    pub refinements: usize,
}

/// Orthogonal transformation picked up by a complement continued once
/// around a loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HolonomyReport {
    pub loop_length: usize,
    /// Rows of the final complement expressed in the rows of the seed.
    pub holonomy: Vec<Vec<f64>>,
    /// `‖H·Hᵀ − I‖_F`.
    pub residual: f64,
    /// `‖H − I‖_F`.
    pub distance_from_identity: f64,
    pub determinant: f64,
    pub classification: HolonomyClass,
    pub closure_residual: f64,
    pub max_stack_residual: f64,
    pub steps: StepStatistics,
}

impl HolonomyReport {
    pub fn holonomy_matrix(&self) -> DMatrix<f64> {
        let m = self.holonomy.len();
        DMatrix::from_fn(m, m, |r, c| self.holonomy[r][c])
    }

    pub fn det_sign(&self) -> i32 {
        if self.determinant < 0.0 {
            -1
        } else {
            1
        }
    }
}

fn step_statistics(path: &FrameField) -> (f64, f64) {
    let steps: Vec<f64> = path
        .samples
        .windows(2)
        .map(|w| (w[1].frame.matrix() - w[0].frame.matrix()).norm())
        .collect();
    if steps.is_empty() {
        return (0.0, 0.0);
    }
    let max = steps.iter().cloned().fold(0.0, f64::max);
    (max, steps.iter().sum::<f64>() / steps.len() as f64)
}

/// Continues `seed` around a closed loop and compares the result with the
/// seed.
///
/// `closure` is the orthogonal n×n fiber map identifying the last sample's
/// fiber with the first one's (identity when `None`); the loop counts as
/// closed when `closure·F_last = F_first` within `tol.parseval`. Steps that
/// are too large are refined up to `max_refine` halvings.
pub fn loop_holonomy(
    path: &FrameField,
    seed: &Frame,
    closure: Option<&DMatrix<f64>>,
    tol: &Tolerances,
    max_refine: usize,
) -> Result<HolonomyReport> {
    let (first, last) = match (path.samples.first(), path.samples.last()) {
        (Some(a), Some(b)) if path.len() >= 2 => (&a.frame, &b.frame),
        _ => return Err(Error::BadShape("a loop needs at least two samples".into())),
    };
    let n = first.n();
    let closed_last = match closure {
        Some(t) => {
            if t.nrows() != n || t.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.nrows() });
            }
            t * last.matrix()
        }
        None => last.matrix().clone(),
    };
    let closure_residual = (&closed_last - first.matrix()).norm();
    if closure_residual > tol.parseval {
        return Err(Error::NotClosed { residual: closure_residual });
    }

    let (field, refinements) = continue_with_refinement(path, seed, tol, max_refine)?;
    Ok(report_from_field(&field, refinements, closure_residual, tol))
}

fn report_from_field(
    field: &ComplementField,
    refinements: usize,
    closure_residual: f64,
    tol: &Tolerances,
) -> HolonomyReport {
    let seed = field.complements.first().expect("non-empty loop").matrix();
    let end = field.complements.last().expect("non-empty loop").matrix();
    let m = seed.nrows();
    let h = end * seed.transpose();
    let id = DMatrix::<f64>::identity(m, m);
    let residual = (&h * h.transpose() - &id).norm();
    let distance_from_identity = (&h - &id).norm();
    let determinant = if m == 0 { 1.0 } else { h.determinant() };
    let classification = if distance_from_identity > tol.holonomy {
        HolonomyClass::Nontrivial
    } else {
        HolonomyClass::Trivial
    };
    let (max_step, mean_step) = step_statistics(&field.base);
    HolonomyReport {
        loop_length: field.len(),
        holonomy: (0..m).map(|r| h.row(r).iter().cloned().collect()).collect(),
        residual,
        distance_from_identity,
        determinant,
        classification,
        closure_residual,
        max_stack_residual: field.max_stack_residual,
        steps: StepStatistics { max_step, mean_step, refinements },
    }
}

/// The same loop traversed backwards, starting from its last sample.
pub fn reverse_loop(path: &FrameField) -> FrameField {
    let mut rev = path.clone();
    rev.samples.reverse();
    rev.grid_shape = None;
    rev
}
