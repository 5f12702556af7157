//! Moving Parseval frames on surfaces: the explicit sphere and band frames,
//! tangent projection of an ambient orthonormal basis, and the check that a
//! sampled field descends through an edge gluing.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::atlas::field::{FieldSample, FrameField, ParamGrid};
use crate::atlas::surface::{Domain, EdgeGluing, Surface};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg;
use crate::tolerances::Tolerances;

/// Matching tolerance for parameter points on glued edges.
const EDGE_MATCH_TOL: f64 = 1e-9;

/// Projection of the standard basis of R³ onto the tangent plane of the unit
/// sphere at `p`, in ambient coordinates: column i is `eᵢ − pᵢ·p`.
pub fn sphere_frame(p: [f64; 3]) -> Result<Frame> {
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotOnSphere { norm });
    }
    let [x, y, z] = p;
    let m = DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 - x * x, -x * y, -x * z, //
            -x * y, 1.0 - y * y, -y * z, //
            -x * z, -y * z, 1.0 - z * z,
        ],
    );
    Ok(Frame::from_matrix_unchecked(m))
}

/// Three-vector frame for the flat band over the unit square:
/// `(cos πv, 0)`, `(sin πv, 0)`, `(0, 1)`. Parseval everywhere.
pub fn band_frame(u: f64, v: f64) -> Result<Frame> {
    if !Domain::UNIT_SQUARE.contains([u, v]) {
        return Err(Error::OutOfDomain { u, v });
    }
    let (s, c) = (PI * v).sin_cos();
    Ok(Frame::from_matrix_unchecked(DMatrix::from_row_slice(
        2,
        3,
        &[c, s, 0.0, 0.0, 0.0, 1.0],
    )))
}

/// [`band_frame`] sampled on a structured `nu × nv` grid of the unit square.
pub fn band_field(surface: &str, nu: usize, nv: usize) -> Result<FrameField> {
    let grid = ParamGrid::structured(Domain::UNIT_SQUARE, nu, nv, [0.0, 0.0])?;
    sample_band(surface, &grid)
}

/// [`band_frame`] along arbitrary parameter points.
pub fn sample_band(surface: &str, grid: &ParamGrid) -> Result<FrameField> {
    let samples = grid
        .points
        .iter()
        .map(|&uv| Ok(FieldSample { uv, frame: band_frame(uv[0], uv[1])? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameField::new(surface, samples)?.with_grid_shape(grid.shape))
}

fn checked_jacobian(s: &dyn Surface, uv: [f64; 2]) -> Result<DMatrix<f64>> {
    let j = s.jacobian(uv[0], uv[1]);
    let svd = j.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if j.ncols() != 2 || smin.is_nan() || smin <= 1e-10 * smax.max(f64::MIN_POSITIVE) {
        return Err(Error::RankDeficientJacobian { u: uv[0], v: uv[1] });
    }
    Ok(j)
}

/// Orthogonal projector `J(JᵀJ)⁻¹Jᵀ` onto the tangent plane at `uv`.
pub fn tangent_projector(s: &dyn Surface, uv: [f64; 2]) -> Result<DMatrix<f64>> {
    let j = checked_jacobian(s, uv)?;
    let jtj = j.tr_mul(&j);
    let inv = jtj
        .cholesky()
        .ok_or(Error::RankDeficientJacobian { u: uv[0], v: uv[1] })?
        .inverse();
    let p = &j * inv * j.transpose();
    Ok((&p + p.transpose()) * 0.5)
}

/// Orthonormal tangent basis (d×2) from the QR factor of the jacobian, with
/// columns pointing along the partial derivatives.
fn tangent_basis(j: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = j.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..q.ncols() {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// A field together with the tangent bases its fiber coordinates refer to.
#[derive(Debug, Clone)]
pub struct ProjectedField {
    pub field: FrameField,
    /// d×2 orthonormal basis of the tangent plane at each sample.
    pub tangent_bases: Vec<DMatrix<f64>>,
}

impl ProjectedField {
    /// Sample `idx` expressed back in ambient Rᵈ coordinates.
    pub fn ambient_frame(&self, idx: usize) -> Frame {
        Frame::from_matrix_unchecked(&self.tangent_bases[idx] * self.field.samples[idx].frame.matrix())
    }
}

/// Projects the ambient orthonormal basis `onb` onto the tangent plane at
/// every grid point and writes the result in tangent coordinates.
///
/// Tangent bases are aligned column by column with the grid parent (see
/// [`ParamGrid::alignment_parent`]) so fiber coordinates vary continuously.
pub fn project_ambient_field(
    s: &dyn Surface,
    onb: &Frame,
    grid: &ParamGrid,
    tol: &Tolerances,
) -> Result<ProjectedField> {
    let d = s.ambient_dim();
    if onb.n() != d || onb.k() != d {
        return Err(Error::DimensionMismatch { expected: d, found: onb.n() });
    }
    let onb_residual = linalg::row_orthonormality_residual(onb.matrix());
    if onb_residual > tol.parseval {
        return Err(Error::NotOrthonormal { residual: onb_residual });
    }
    let domain = s.domain();
    if let Some(&uv) = grid.points.iter().find(|uv| !domain.contains(**uv)) {
        return Err(Error::OutOfDomain { u: uv[0], v: uv[1] });
    }

    let local: Vec<(DMatrix<f64>, DMatrix<f64>)> = grid
        .points
        .par_iter()
        .map(|&uv| {
            let p = tangent_projector(s, uv)?;
            let q = tangent_basis(&checked_jacobian(s, uv)?);
            Ok((p, q))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bases: Vec<DMatrix<f64>> = Vec::with_capacity(local.len());
    for (idx, (_, q)) in local.iter().enumerate() {
        let mut q = q.clone();
        if let Some(parent) = grid.alignment_parent(idx) {
            for c in 0..q.ncols() {
                if q.column(c).dot(&bases[parent].column(c)) < 0.0 {
                    q.column_mut(c).neg_mut();
                }
            }
        }
        bases.push(q);
    }

    let samples = grid
        .points
        .par_iter()
        .zip(local.par_iter())
        .zip(bases.par_iter())
        .map(|((&uv, (p, _)), q)| FieldSample {
            uv,
            frame: Frame::from_matrix_unchecked(q.tr_mul(&(p * onb.matrix()))),
        })
        .collect::<Vec<_>>();
    let field = FrameField::new(s.name(), samples)?.with_grid_shape(grid.shape);
    Ok(ProjectedField { field, tangent_bases: bases })
}

/// Largest `‖T·fᵢ(source) − fᵢ(target)‖` over samples on the source edge and
/// frame indices i, where T is the gluing's tangent map.
pub fn identification_residual(field: &FrameField, gluing: &EdgeGluing) -> Result<f64> {
    if field.fiber_dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: field.fiber_dim });
    }
    let t = gluing.tangent_map_dyn();
    let mut worst: f64 = 0.0;
    let mut matched = 0usize;
    for src in &field.samples {
        let Some(target_uv) = gluing.map_point(src.uv, EDGE_MATCH_TOL) else {
            continue;
        };
        let tgt = field
            .samples
            .iter()
            .find(|s| {
                (s.uv[0] - target_uv[0]).abs() <= EDGE_MATCH_TOL
                    && (s.uv[1] - target_uv[1]).abs() <= EDGE_MATCH_TOL
            })
            .ok_or_else(|| {
                Error::MissingEdgeSamples(format!(
                    "no sample at ({}, {}) matching source ({}, {}) of {}",
                    target_uv[0], target_uv[1], src.uv[0], src.uv[1], gluing.name
                ))
            })?;
        let diff = &t * src.frame.matrix() - tgt.frame.matrix();
        for i in 0..diff.ncols() {
            worst = worst.max(diff.column(i).norm());
        }
        matched += 1;
    }
    if matched == 0 {
        return Err(Error::MissingEdgeSamples(format!(
            "no samples on the source edge of {}",
            gluing.name
        )));
    }
    Ok(worst)
}

/// The `index`-th frame vector of every sample, as `(uv, vector)` pairs.
pub fn projected_vector_samples(field: &FrameField, index: usize) -> Vec<([f64; 2], DVector<f64>)> {
    field.samples.iter().map(|s| (s.uv, s.frame.vector(index))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::surface::{DonutTorus, FlatPlane, GluedSquare, UnitSphere};
    use crate::dilation::project_frame;
    use crate::frame::is_parseval;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sphere_frame_at_poles() {
        let f = sphere_frame([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.columns(), vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]]);
        let f = sphere_frame([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.columns(), vec![vec![0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert!(matches!(sphere_frame([1.0, 1.0, 0.0]), Err(Error::NotOnSphere { .. })));
    }

    #[test]
    fn sphere_frame_reconstructs_tangent_vectors() {
        // brute-force ∑⟨y, fᵢ⟩fᵢ over random tangent y
        let p = [0.36, 0.48, 0.8];
        let f = sphere_frame(p).unwrap();
        for y0 in [[1.0, 0.0, 0.0], [0.3, -2.0, 1.1], [0.0, 0.0, 1.0]] {
            let dot: f64 = (0..3).map(|i| y0[i] * p[i]).sum();
            let y: Vec<f64> = (0..3).map(|i| y0[i] - dot * p[i]).collect();
            let mut rec = [0.0; 3];
            for c in f.columns() {
                let coef: f64 = (0..3).map(|i| c[i] * y[i]).sum();
                for i in 0..3 {
                    rec[i] += coef * c[i];
                }
            }
            for i in 0..3 {
                assert!((rec[i] - y[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn band_frame_examples() {
        let f = band_frame(0.3, 0.0).unwrap();
        assert_eq!(f.columns(), vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]);
        let f = band_frame(0.3, 0.5).unwrap();
        assert!((f.matrix()[(0, 0)]).abs() < 1e-16);
        assert_eq!(f.matrix()[(0, 1)], 1.0);
        assert!(matches!(band_frame(1.2, 0.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn sphere_projector_is_normal_complement() {
        let (u, v) = (0.9f64, 2.1f64);
        let p = UnitSphere.embed(u, v);
        let proj = tangent_projector(&UnitSphere, [u, v]).unwrap();
        let expect = DMatrix::identity(3, 3) - &p * p.transpose();
        assert!((proj - expect).norm() < 1e-12);
    }

    #[test]
    fn flat_projector() {
        let proj = tangent_projector(&FlatPlane, [0.2, 0.7]).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((proj - expect).norm() < 1e-15);
    }

    #[test]
    fn pole_is_rank_deficient() {
        assert!(matches!(
            tangent_projector(&UnitSphere, [0.0, 1.0]),
            Err(Error::RankDeficientJacobian { .. })
        ));
    }

    #[test]
    fn sphere_field_matches_explicit_formulas() {
        let grid = ParamGrid::structured(UnitSphere.domain(), 12, 9, UnitSphere.grid_margin()).unwrap();
        let pf = project_ambient_field(&UnitSphere, &Frame::standard_basis(3), &grid, &tol()).unwrap();
        for (idx, s) in pf.field.samples.iter().enumerate() {
            let p = UnitSphere.embed(s.uv[0], s.uv[1]);
            let expect = sphere_frame([p[0], p[1], p[2]]).unwrap();
            assert!((pf.ambient_frame(idx).matrix() - expect.matrix()).norm() < 1e-12);
            assert!(is_parseval(&s.frame, 1e-12).parseval);
        }
    }

    #[test]
    fn flat_field_is_constant() {
        let grid = ParamGrid::structured(FlatPlane.domain(), 4, 4, [0.0, 0.0]).unwrap();
        let pf = project_ambient_field(&FlatPlane, &Frame::standard_basis(3), &grid, &tol()).unwrap();
        for s in &pf.field.samples {
            assert_eq!(s.frame.columns(), vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        }
    }

    #[test]
    fn torus_field_is_parseval() {
        let t = DonutTorus::default();
        let grid = ParamGrid::structured(t.domain(), 20, 20, [0.0, 0.0]).unwrap();
        let pf = project_ambient_field(&t, &Frame::standard_basis(3), &grid, &tol()).unwrap();
        assert!(pf.field.parseval_summary(1e-8).passed);
    }

    #[test]
    fn sphere_projection_agrees_with_project_frame() {
        let p = [0.6, 0.0, 0.8];
        let pv = DVector::from_vec(p.to_vec());
        let proj = DMatrix::identity(3, 3) - &pv * pv.transpose();
        let a = project_frame(&Frame::standard_basis(3), &proj, &tol()).unwrap();
        let b = sphere_frame(p).unwrap();
        assert!((a.matrix() - b.matrix()).norm() < 1e-15);
    }

    #[test]
    fn band_descends_to_mobius_and_klein() {
        let f = band_field("mobius", 11, 11).unwrap();
        for g in GluedSquare::klein().identifications() {
            assert!(identification_residual(&f, &g).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn constant_field_fails_mobius_gluing() {
        let grid = ParamGrid::structured(Domain::UNIT_SQUARE, 5, 5, [0.0, 0.0]).unwrap();
        let c = Frame::from_columns(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let samples = grid.points.iter().map(|&uv| FieldSample { uv, frame: c.clone() }).collect();
        let f = FrameField::new("mobius", samples).unwrap();
        let r = identification_residual(&f, &EdgeGluing::mobius_twist()).unwrap();
        assert!((r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn missing_edge_samples() {
        let grid = ParamGrid::from_points(vec![[0.25, 1.0], [0.5, 0.5]]);
        let f = sample_band("mobius", &grid).unwrap();
        assert!(matches!(
            identification_residual(&f, &EdgeGluing::mobius_twist()),
            Err(Error::MissingEdgeSamples(_))
        ));
        let interior = sample_band("mobius", &ParamGrid::from_points(vec![[0.5, 0.5]])).unwrap();
        assert!(identification_residual(&interior, &EdgeGluing::mobius_twist()).is_err());
    }
}
