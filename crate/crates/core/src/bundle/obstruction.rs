//! Zero-locus scans of sampled vector fields.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::atlas::field::ParamGrid;
use crate::atlas::moving::{project_ambient_field, projected_vector_samples};
use crate::atlas::surface::{Surface, UnitSphere};
use crate::error::Result;
use crate::frame::Frame;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroHit {
    pub index: usize,
    pub uv: [f64; 2],
    pub norm: f64,
}

/// Grid points whose sample has norm at most `tol`, in sample order.
pub fn zero_locus_scan(samples: &[([f64; 2], DVector<f64>)], tol: f64) -> Vec<ZeroHit> {
    samples
        .iter()
        .enumerate()
        .filter_map(|(index, (uv, x))| {
            let norm = x.norm();
            (norm <= tol).then_some(ZeroHit { index, uv: *uv, norm })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObstructionReport {
    pub grid: [usize; 2],
    pub tolerance: f64,
    /// Analytic zeros of the projected field in chart parameters.
    pub zeros: Vec<[f64; 2]>,
    pub hits: Vec<ZeroHit>,
    pub hits_per_zero: Vec<usize>,
    /// Largest parameter distance from a hit to its nearest analytic zero.
    pub max_hit_distance: f64,
}

/// Projects `e₂` onto the tangent planes of the unit sphere over an
/// `n_polar × n_azimuth` grid and scans for its zeros, which must exist since
/// the sphere has no nowhere-vanishing tangent field. Analytically they sit
/// at `(0, ±1, 0)`, i.e. chart parameters `(π/2, π/2)` and `(π/2, 3π/2)`.
pub fn sphere_obstruction(
    n_polar: usize,
    n_azimuth: usize,
    zero_tol: f64,
    tol: &Tolerances,
) -> Result<ObstructionReport> {
    use std::f64::consts::FRAC_PI_2;
    let sphere = UnitSphere;
    let grid = ParamGrid::structured(sphere.domain(), n_polar, n_azimuth, sphere.grid_margin())?;
    let pf = project_ambient_field(&sphere, &Frame::standard_basis(3), &grid, tol)?;
    let samples = projected_vector_samples(&pf.field, 1);
    let hits = zero_locus_scan(&samples, zero_tol);
    let zeros = vec![[FRAC_PI_2, FRAC_PI_2], [FRAC_PI_2, 3.0 * FRAC_PI_2]];
    let dist = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let mut hits_per_zero = vec![0; zeros.len()];
    let mut max_hit_distance: f64 = 0.0;
    for h in &hits {
        let (nearest, d) = zeros
            .iter()
            .enumerate()
            .map(|(i, z)| (i, dist(h.uv, *z)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("two zeros");
        hits_per_zero[nearest] += 1;
        max_hit_distance = max_hit_distance.max(d);
    }
    Ok(ObstructionReport {
        grid: [n_polar, n_azimuth],
        tolerance: zero_tol,
        zeros,
        hits,
        hits_per_zero,
        max_hit_distance,
    })
}
