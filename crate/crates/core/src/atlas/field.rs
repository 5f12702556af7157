//! Frames sampled over parameter grids or along paths.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::atlas::surface::Domain;
use crate::error::{Error, Result};
use crate::frame::{is_parseval, Frame};

/// Parameter points, optionally carrying a row-major `(nu, nv)` structure
/// (index `iv * nu + iu`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub points: Vec<[f64; 2]>,
    pub shape: Option<(usize, usize)>,
}

impl ParamGrid {
    /// `nu × nv` equispaced points covering `domain` shrunk by `margin`.
    pub fn structured(domain: Domain, nu: usize, nv: usize, margin: [f64; 2]) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::BadShape(format!("grid needs >= 2 points per axis, got {nu}x{nv}")));
        }
        let (u0, u1) = (domain.u.0 + margin[0], domain.u.1 - margin[0]);
        let (v0, v1) = (domain.v.0 + margin[1], domain.v.1 - margin[1]);
        let mut points = Vec::with_capacity(nu * nv);
        for iv in 0..nv {
            let v = lerp(v0, v1, iv, nv);
            for iu in 0..nu {
                points.push([lerp(u0, u1, iu, nu), v]);
            }
        }
        Ok(Self { points, shape: Some((nu, nv)) })
    }

    /// Unstructured points, visited in the given order.
    pub fn from_points(points: Vec<[f64; 2]>) -> Self {
        Self { points, shape: None }
    }

    /// `samples` equispaced points from `start` to `end` inclusive.
    pub fn segment(start: [f64; 2], end: [f64; 2], samples: usize) -> Self {
        let pts = (0..samples)
            .map(|i| [lerp(start[0], end[0], i, samples), lerp(start[1], end[1], i, samples)])
            .collect();
        Self::from_points(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the already-visited neighbour a sample is aligned against:
    /// the left neighbour, or the one below at the start of a grid row.
    pub fn alignment_parent(&self, idx: usize) -> Option<usize> {
        if idx == 0 {
            return None;
        }
        match self.shape {
            Some((nu, _)) if idx.is_multiple_of(nu) => Some(idx - nu),
            _ => Some(idx - 1),
        }
    }
}

fn lerp(a: f64, b: f64, i: usize, count: usize) -> f64 {
    if count <= 1 {
        return a;
    }
    if i + 1 == count {
        return b;
    }
    a + (b - a) * i as f64 / (count - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub uv: [f64; 2],
    pub frame: Frame,
}

/// A frame sampled at parameter points of a named surface. All samples share
/// the fiber dimension `n` and frame size `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameField {
    pub surface: String,
    pub fiber_dim: usize,
    pub frame_size: usize,
    pub samples: Vec<FieldSample>,
    #[serde(skip)]
    pub grid_shape: Option<(usize, usize)>,
}

/// Per-sample and worst-case Parseval residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ParsevalSummary {
    pub residuals: Vec<f64>,
    pub worst: f64,
    pub worst_index: usize,
    pub passed: bool,
}

impl FrameField {
    pub fn new(surface: impl Into<String>, samples: Vec<FieldSample>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::BadShape("a field needs at least one sample".into()))?;
        let (n, k) = (first.frame.n(), first.frame.k());
        for s in &samples {
            if s.frame.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.frame.n() });
            }
            if s.frame.k() != k {
                return Err(Error::DimensionMismatch { expected: k, found: s.frame.k() });
            }
        }
        Ok(Self { surface: surface.into(), fiber_dim: n, frame_size: k, samples, grid_shape: None })
    }

    pub fn with_grid_shape(mut self, shape: Option<(usize, usize)>) -> Self {
        self.grid_shape = shape;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn frames(&self) -> impl Iterator<Item = &Frame> {
        self.samples.iter().map(|s| &s.frame)
    }

    /// Checks the shared-shape invariant and that every point lies in `domain`.
    pub fn validate(&self, domain: Option<Domain>) -> Result<()> {
        for s in &self.samples {
            if s.frame.n() != self.fiber_dim {
                return Err(Error::DimensionMismatch { expected: self.fiber_dim, found: s.frame.n() });
            }
            if s.frame.k() != self.frame_size {
                return Err(Error::DimensionMismatch {
                    expected: self.frame_size,
                    found: s.frame.k(),
                });
            }
            if let Some(d) = domain {
                if !d.contains(s.uv) {
                    return Err(Error::OutOfDomain { u: s.uv[0], v: s.uv[1] });
                }
            }
        }
        Ok(())
    }

    pub fn parseval_summary(&self, tol: f64) -> ParsevalSummary {
        let residuals: Vec<f64> = self.frames().map(|f| is_parseval(f, tol).residual).collect();
        let (worst_index, worst) = residuals
            .iter()
            .cloned()
            .enumerate()
            .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        ParsevalSummary { passed: worst <= tol, residuals, worst, worst_index }
    }

    /// Largest Frobenius distance between consecutive samples (or grid
    /// neighbours when the grid shape is known).
    pub fn max_adjacent_jump(&self) -> f64 {
        let grid = ParamGrid {
            points: self.samples.iter().map(|s| s.uv).collect(),
            shape: self.grid_shape,
        };
        (1..self.len())
            .filter_map(|i| grid.alignment_parent(i).map(|p| (i, p)))
            .map(|(i, p)| (self.samples[i].frame.matrix() - self.samples[p].frame.matrix()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let field: FrameField = serde_json::from_str(s)?;
        field.validate(None)?;
        Ok(field)
    }

    /// One row per (sample, frame index): `u, v`, then the n coordinates.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["u".to_string(), "v".to_string()];
        header.extend((1..=self.fiber_dim).map(|i| format!("x{i}")));
        out.write_record(&header)?;
        for s in &self.samples {
            for i in 0..s.frame.k() {
                let mut row = vec![s.uv[0].to_string(), s.uv[1].to_string()];
                row.extend(s.frame.matrix().column(i).iter().map(|x| x.to_string()));
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`FrameField::write_csv`], taking every
    /// `frame_size` consecutive rows as one sample.
    pub fn read_csv<R: Read>(r: R, surface: &str, frame_size: usize) -> Result<Self> {
        if frame_size == 0 {
            return Err(Error::BadShape("frame size must be positive".into()));
        }
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() < 3 {
                return Err(Error::Parse("csv rows need u, v and coordinates".into()));
            }
            rows.push(row);
        }
        if !rows.len().is_multiple_of(frame_size) {
            return Err(Error::Parse(format!(
                "{} rows is not a multiple of frame size {frame_size}",
                rows.len()
            )));
        }
        let n = rows[0].len() - 2;
        let mut samples = Vec::with_capacity(rows.len() / frame_size);
        for chunk in rows.chunks(frame_size) {
            let uv = [chunk[0][0], chunk[0][1]];
            if chunk.iter().any(|r| r[0] != uv[0] || r[1] != uv[1]) {
                return Err(Error::Parse("rows of one sample disagree on (u, v)".into()));
            }
            let cols: Vec<Vec<f64>> = chunk.iter().map(|r| r[2..].to_vec()).collect();
            samples.push(FieldSample { uv, frame: Frame::from_columns(n, &cols)? });
        }
        Self::new(surface, samples)
    }
}
