//! Complement fields: a complement frame chosen at every sample of a moving
//! Parseval frame so that each stacked array `[F; G]` is orthogonal.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::atlas::field::{FieldSample, FrameField, ParamGrid};
use crate::dilation::{det_normalized_complement, local_complement, stacked_residual};
use crate::error::{Error, Result};
use crate::frame::{parseval_normalize, require_parseval, Frame};
use crate::linalg;
use crate::tolerances::Tolerances;

/// Refinement depth the CLI allows before giving up on a path.
pub const MAX_REFINE_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ComplementMethod {
    /// Orthonormalized kernel-projector rows, aligned across samples.
    Canonical,
    /// Gram-Schmidt continuation from a seed along the sample order.
    Continuation,
    /// Pointwise `det = +1` completion, for `k = n + 1` only.
    DetNormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementField {
    pub base: FrameField,
    pub complements: Vec<Frame>,
    pub method: ComplementMethod,
    pub max_stack_residual: f64,
}

impl ComplementField {
    fn assemble(base: FrameField, complements: Vec<Frame>, method: ComplementMethod) -> Self {
        let max_stack_residual = base
            .frames()
            .zip(&complements)
            .map(|(f, g)| stacked_residual(f, g))
            .fold(0.0, f64::max);
        Self { base, complements, method, max_stack_residual }
    }

    pub fn len(&self) -> usize {
        self.complements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complements.is_empty()
    }

    pub fn stack_residuals(&self) -> Vec<f64> {
        self.base.frames().zip(&self.complements).map(|(f, g)| stacked_residual(f, g)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ComplementSampleRepr {
    uv: [f64; 2],
    frame: Frame,
    complement: Frame,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ComplementFieldRepr {
    surface: String,
    fiber_dim: usize,
    frame_size: usize,
    method: ComplementMethod,
    max_stack_residual: f64,
    samples: Vec<ComplementSampleRepr>,
}

impl Serialize for ComplementField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplementFieldRepr {
            surface: self.base.surface.clone(),
            fiber_dim: self.base.fiber_dim,
            frame_size: self.base.frame_size,
            method: self.method,
            max_stack_residual: self.max_stack_residual,
            samples: self
                .base
                .samples
                .iter()
                .zip(&self.complements)
                .map(|(b, c)| ComplementSampleRepr {
                    uv: b.uv,
                    frame: b.frame.clone(),
                    complement: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplementField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ComplementFieldRepr::deserialize(d)?;
        let mut samples = Vec::with_capacity(repr.samples.len());
        let mut complements = Vec::with_capacity(repr.samples.len());
        for s in repr.samples {
            samples.push(FieldSample { uv: s.uv, frame: s.frame });
            complements.push(s.complement);
        }
        let base = FrameField::new(repr.surface, samples).map_err(D::Error::custom)?;
        if base.fiber_dim != repr.fiber_dim || base.frame_size != repr.frame_size {
            return Err(D::Error::custom("fiberDim/frameSize disagree with samples"));
        }
        Ok(ComplementField {
            base,
            complements,
            method: repr.method,
            max_stack_residual: repr.max_stack_residual,
        })
    }
}

fn alignment_grid(base: &FrameField) -> ParamGrid {
    ParamGrid { points: base.samples.iter().map(|s| s.uv).collect(), shape: base.grid_shape }
}

/// Canonical complement at every sample: the kernel projector `I − FᵀF` has
/// its rows pivot-orthonormalized, then each sample is rotated onto its
/// grid parent by orthogonal Procrustes.
pub fn canonical_field(base: &FrameField, tol: &Tolerances) -> Result<ComplementField> {
    let (n, k) = (base.fiber_dim, base.frame_size);
    if k < n {
        return Err(Error::BadShape(format!("k = {k} < n = {n}")));
    }
    let raw: Vec<DMatrix<f64>> = base
        .samples
        .par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let f = &s.frame;
            require_parseval(f, tol.parseval).map_err(|e| e.at_sample(idx))?;
            let kernel = DMatrix::identity(k, k) - f.gram();
            linalg::pivoted_row_basis(&kernel, f.matrix(), k - n, tol).map_err(|e| e.at_sample(idx))
        })
        .collect::<Result<Vec<_>>>()?;

    let grid = alignment_grid(base);
    let mut aligned: Vec<DMatrix<f64>> = Vec::with_capacity(raw.len());
    for (idx, c) in raw.into_iter().enumerate() {
        let c = match grid.alignment_parent(idx) {
            Some(parent) => linalg::procrustes_rotation(&c, &aligned[parent]) * c,
            None => c,
        };
        aligned.push(c);
    }
    let complements = aligned.into_iter().map(to_complement_frame(k)).collect();
    Ok(ComplementField::assemble(base.clone(), complements, ComplementMethod::Canonical))
}

fn to_complement_frame(k: usize) -> impl Fn(DMatrix<f64>) -> Frame {
    move |m| if m.nrows() == 0 { Frame::empty(k) } else { Frame::from_matrix_unchecked(m) }
}

/// Continues `seed` (a complement of the first sample) along the sample
/// order: complement i+1 is [`local_complement`] of sample i+1 against
/// sample i and complement i.
///
/// A step that leaves the local neighbourhood fails with
/// [`Error::SingularSeed`] carrying the offending sample index.
pub fn continue_complement(
    path: &FrameField,
    seed: &Frame,
    tol: &Tolerances,
) -> Result<ComplementField> {
    let first = &path
        .samples
        .first()
        .ok_or_else(|| Error::BadShape("empty path".into()))?
        .frame;
    if seed.k() != first.k() || seed.n() + first.n() != first.k() {
        return Err(Error::BadShape(format!(
            "seed is {}x{}, expected {}x{}",
            seed.n(),
            seed.k(),
            first.k().saturating_sub(first.n()),
            first.k()
        )));
    }
    let seed_residual = stacked_residual(first, seed);
    if seed_residual > tol.parseval {
        return Err(Error::NotOrthonormal { residual: seed_residual });
    }
    let mut complements = Vec::with_capacity(path.len());
    complements.push(seed.clone());
    for i in 1..path.len() {
        let h = local_complement(
            &path.samples[i].frame,
            &path.samples[i - 1].frame,
            &complements[i - 1],
            tol,
        )
        .map_err(|e| e.at_sample(i))?;
        complements.push(h);
    }
    Ok(ComplementField::assemble(path.clone(), complements, ComplementMethod::Continuation))
}

/// Pointwise [`det_normalized_complement`] at every sample (k = n + 1).
pub fn det_normalized_field(base: &FrameField, tol: &Tolerances) -> Result<ComplementField> {
    let complements = base
        .samples
        .par_iter()
        .enumerate()
        .map(|(idx, s)| det_normalized_complement(&s.frame, tol).map_err(|e| e.at_sample(idx)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplementField::assemble(base.clone(), complements, ComplementMethod::DetNormalized))
}

/// Halves every step of a path: inserts between consecutive samples the
/// Parseval normalization of their average, at the midpoint parameter.
pub fn refine_path(path: &FrameField, tol: &Tolerances) -> Result<FrameField> {
    let mut samples = Vec::with_capacity(2 * path.len());
    for (i, pair) in path.samples.windows(2).enumerate() {
        samples.push(pair[0].clone());
        let mid = (pair[0].frame.matrix() + pair[1].frame.matrix()) * 0.5;
        let frame = parseval_normalize(&Frame::from_matrix(mid)?, tol.parseval)
            .map_err(|e| e.at_sample(i))?;
        let uv = [(pair[0].uv[0] + pair[1].uv[0]) / 2.0, (pair[0].uv[1] + pair[1].uv[1]) / 2.0];
        samples.push(FieldSample { uv, frame });
    }
    if let Some(last) = path.samples.last() {
        samples.push(last.clone());
    }
    FrameField::new(path.surface.clone(), samples)
}

/// [`continue_complement`], refining the path by halving (at most
/// `max_depth` times) whenever a step is too large. Returns the field and the
/// number of halvings used.
pub fn continue_with_refinement(
    path: &FrameField,
    seed: &Frame,
    tol: &Tolerances,
    max_depth: usize,
) -> Result<(ComplementField, usize)> {
    let mut current = path.clone();
    let mut depth = 0;
    loop {
        match continue_complement(&current, seed, tol) {
            Ok(field) => return Ok((field, depth)),
            Err(e @ Error::SingularSeed { .. }) if depth >= max_depth => return Err(e),
            Err(Error::SingularSeed { .. }) => {
                current = refine_path(&current, tol)?;
                depth += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Principal angles between complement row spaces of two fields, worst
/// over samples.
pub fn max_principal_angle(a: &ComplementField, b: &ComplementField) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.complements
        .iter()
        .zip(&b.complements)
        .flat_map(|(x, y)| linalg::principal_angles(x.matrix(), y.matrix()))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::field::ParamGrid;
    use crate::atlas::moving::{band_frame, sample_band, sphere_frame};
    use crate::frame::is_parseval;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v_path(samples: usize) -> FrameField {
        sample_band("mobius", &ParamGrid::segment([0.5, 0.0], [0.5, 1.0], samples)).unwrap()
    }

    #[test]
    fn canonical_field_on_sphere_is_normal_direction() {
        // ambient sphere frame in tangent coordinates via a per-sample basis
        let pts: Vec<[f64; 2]> = (0..40).map(|i| [0.3 + i as f64 * 0.06, 0.1 * i as f64]).collect();
        let samples: Vec<FieldSample> = pts
            .iter()
            .map(|&uv| {
                let p = [uv[0].sin() * uv[1].cos(), uv[0].sin() * uv[1].sin(), uv[0].cos()];
                let amb = sphere_frame(p).unwrap();
                let t1 = [uv[0].cos() * uv[1].cos(), uv[0].cos() * uv[1].sin(), -uv[0].sin()];
                let t2 = [-uv[1].sin(), uv[1].cos(), 0.0];
                let rows: Vec<Vec<f64>> = [t1, t2]
                    .iter()
                    .map(|t| {
                        (0..3).map(|i| (0..3).map(|r| t[r] * amb.matrix()[(r, i)]).sum()).collect()
                    })
                    .collect();
                (uv, p, Frame::from_rows(3, &rows).unwrap())
            })
            .map(|(uv, _, frame)| FieldSample { uv, frame })
            .collect();
        let base = FrameField::new("sphere", samples).unwrap();
        let cf = canonical_field(&base, &tol()).unwrap();
        assert!(cf.max_stack_residual < 1e-12);
        for (s, g) in base.samples.iter().zip(&cf.complements) {
            let uv = s.uv;
            let p = [uv[0].sin() * uv[1].cos(), uv[0].sin() * uv[1].sin(), uv[0].cos()];
            let dot: f64 = (0..3).map(|i| g.matrix()[(0, i)] * p[i]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-12);
        }
        // aligned: no sign jumps between neighbours
        for w in cf.complements.windows(2) {
            assert!((w[0].matrix().row(0).dot(&w[1].matrix().row(0))) > 0.0);
        }
    }

    #[test]
    fn constant_field_has_constant_complement() {
        let f = band_frame(0.0, 0.3).unwrap();
        let samples = (0..5).map(|i| FieldSample { uv: [i as f64 * 0.1, 0.3], frame: f.clone() }).collect();
        let base = FrameField::new("mobius", samples).unwrap();
        let cf = canonical_field(&base, &tol()).unwrap();
        for g in &cf.complements {
            assert!((g.matrix() - cf.complements[0].matrix()).norm() < 1e-15);
        }
        let seed = cf.complements[0].clone();
        let cont = continue_complement(&base, &seed, &tol()).unwrap();
        for g in &cont.complements {
            assert!((g.matrix() - seed.matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn band_continuation_follows_closed_form() {
        let path = v_path(200);
        let seed = det_normalized_complement(&path.samples[0].frame, &tol()).unwrap();
        let cf = continue_complement(&path, &seed, &tol()).unwrap();
        for (s, g) in path.samples.iter().zip(&cf.complements) {
            let a = PI * s.uv[1];
            let expect = [a.sin(), -a.cos(), 0.0];
            for (j, e) in expect.iter().enumerate() {
                assert!((g.matrix()[(0, j)] - e).abs() < 1e-10);
            }
        }
        let last = cf.complements.last().unwrap();
        assert!((last.matrix()[(0, 1)] - 1.0).abs() < 1e-12);
        assert!(cf.max_stack_residual < 1e-8);
    }

    #[test]
    fn canonical_band_field_matches_cross_product_up_to_sign() {
        let path = v_path(50);
        let cf = canonical_field(&path, &tol()).unwrap();
        let sign = -cf.complements[0].matrix()[(0, 1)].signum();
        for (s, g) in path.samples.iter().zip(&cf.complements) {
            let a = PI * s.uv[1];
            let expect = [a.sin(), -a.cos(), 0.0];
            for (j, e) in expect.iter().enumerate() {
                assert!((g.matrix()[(0, j)] - sign * e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mercedes_rotation_continues_smoothly() {
        let s = (2.0f64 / 3.0).sqrt();
        let samples: Vec<FieldSample> = (0..=120)
            .map(|i| {
                let t = (2.0 * PI / 3.0) * i as f64 / 120.0;
                let cols: Vec<Vec<f64>> = (0..3)
                    .map(|j| {
                        let a = t + 2.0 * PI * j as f64 / 3.0;
                        vec![s * a.cos(), s * a.sin()]
                    })
                    .collect();
                FieldSample { uv: [t, 0.0], frame: Frame::from_columns(2, &cols).unwrap() }
            })
            .collect();
        let path = FrameField::new("rotation", samples).unwrap();
        let seed = crate::dilation::dilate(&path.samples[0].frame, &tol()).unwrap().complement;
        let cf = continue_complement(&path, &seed, &tol()).unwrap();
        assert!(cf.max_stack_residual <= 1e-8);
        // the rotation fixes the kernel direction (1,1,1)/√3
        for g in &cf.complements {
            let sum: f64 = g.matrix().row(0).sum();
            assert!((sum.abs() - 3.0f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn large_step_is_singular_seed_and_refinement_recovers() {
        // the kernel direction turns by a right angle in one step
        let path = v_path(3);
        let seed = det_normalized_complement(&path.samples[0].frame, &tol()).unwrap();
        let err = continue_complement(&path, &seed, &tol()).unwrap_err();
        assert_eq!(err.kind(), "SingularSeed");
        assert!(matches!(err, Error::SingularSeed { index: Some(1), .. }));
        let (cf, depth) = continue_with_refinement(&path, &seed, &tol(), MAX_REFINE_DEPTH).unwrap();
        assert!(depth >= 1);
        let last = cf.complements.last().unwrap();
        assert!((last.matrix()[(0, 1)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complements_are_parseval_in_fiber_coordinates() {
        let cf = canonical_field(&v_path(30), &tol()).unwrap();
        for g in &cf.complements {
            assert!(is_parseval(g, 1e-8).parseval);
        }
    }

    #[test]
    fn canonical_rejects_non_parseval_sample() {
        let mut base = v_path(4);
        base.samples[2].frame = Frame::from_columns(2, &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let err = canonical_field(&base, &tol()).unwrap_err();
        assert!(matches!(err, Error::AtSample { index: 2, .. }));
        assert_eq!(err.kind(), "NotParseval");
    }

    #[test]
    fn json_round_trip() {
        let cf = canonical_field(&v_path(5), &tol()).unwrap();
        let s = cf.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["method"], "canonical");
        assert!(v["samples"][0]["complement"]["k"] == 3);
        assert_eq!(ComplementField::from_json(&s).unwrap(), cf);
    }
}
