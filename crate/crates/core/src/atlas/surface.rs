//! Parameterized surfaces and edge gluings.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};

/// Step for the central-difference jacobian fallback.
pub const JACOBIAN_FD_STEP: f64 = 1e-6;

/// Parameter margin kept away from coordinate singularities in grids.
pub const POLE_MARGIN: f64 = 1e-3;

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Domain {
    pub const UNIT_SQUARE: Domain = Domain { u: (0.0, 1.0), v: (0.0, 1.0) };

    pub fn contains(&self, uv: [f64; 2]) -> bool {
        const SLACK: f64 = 1e-12;
        uv[0] >= self.u.0 - SLACK
            && uv[0] <= self.u.1 + SLACK
            && uv[1] >= self.v.0 - SLACK
            && uv[1] <= self.v.1 + SLACK
    }
}

/// A straight parameter-space segment from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSegment {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl EdgeSegment {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Self {
        Self { start, end }
    }

    fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }

    pub fn point_at(&self, s: f64) -> [f64; 2] {
        [
            self.start[0] + s * (self.end[0] - self.start[0]),
            self.start[1] + s * (self.end[1] - self.start[1]),
        ]
    }

    /// Segment parameter of `p` when `p` lies on the segment.
    pub fn locate(&self, p: [f64; 2], tol: f64) -> Option<f64> {
        let d = [self.end[0] - self.start[0], self.end[1] - self.start[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let w = [p[0] - self.start[0], p[1] - self.start[1]];
        let s = (w[0] * d[0] + w[1] * d[1]) / len2;
        if !(-tol..=1.0 + tol).contains(&s) {
            return None;
        }
        let q = self.point_at(s);
        ((q[0] - p[0]).hypot(q[1] - p[1]) <= tol).then_some(s.clamp(0.0, 1.0))
    }
}

/// Identification of a source edge with a target edge. The parameter map is
/// the affine map sending `source.start ↦ target.start` and
/// `source.end ↦ target.end`; `tangent_map` acts on fiber coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGluing {
    pub name: String,
    pub source: EdgeSegment,
    pub target: EdgeSegment,
    pub tangent_map: Matrix2<f64>,
}

impl EdgeGluing {
    pub fn new(
        name: impl Into<String>,
        source: EdgeSegment,
        target: EdgeSegment,
        tangent_map: Matrix2<f64>,
    ) -> Result<Self> {
        if source.length() == 0.0 || target.length() == 0.0 {
            return Err(Error::InvalidGluing("degenerate edge segment".into()));
        }
        if tangent_map.determinant().abs() < 1e-12 {
            return Err(Error::InvalidGluing("tangent map is not invertible".into()));
        }
        Ok(Self { name: name.into(), source, target, tangent_map })
    }

    /// Image of a source-edge point, or `None` off the source edge.
    pub fn map_point(&self, p: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        self.source.locate(p, tol).map(|s| self.target.point_at(s))
    }

    pub fn tangent_map_dyn(&self) -> DMatrix<f64> {
        DMatrix::from_fn(2, 2, |r, c| self.tangent_map[(r, c)])
    }

    /// Top-bottom twist of the unit square: `(x, 1) ≡ (1 − x, 0)`.
    pub fn mobius_twist() -> Self {
        Self::new(
            "mobius-twist",
            EdgeSegment::new([0.0, 1.0], [1.0, 1.0]),
            EdgeSegment::new([1.0, 0.0], [0.0, 0.0]),
            Matrix2::new(-1.0, 0.0, 0.0, 1.0),
        )
        .expect("static gluing is valid")
    }

    /// Side gluing of the unit square: `(1, y) ≡ (0, y)`.
    pub fn side_identity() -> Self {
        Self::new(
            "klein-sides",
            EdgeSegment::new([1.0, 0.0], [1.0, 1.0]),
            EdgeSegment::new([0.0, 0.0], [0.0, 1.0]),
            Matrix2::identity(),
        )
        .expect("static gluing is valid")
    }

    fn periodic(name: &str, source: EdgeSegment, target: EdgeSegment) -> Self {
        Self::new(name, source, target, Matrix2::identity()).expect("static gluing is valid")
    }
}

/// A chart `(u, v) ↦ Rᵈ` with its differential.
pub trait Surface: Send + Sync {
    fn name(&self) -> &str;
    fn domain(&self) -> Domain;
    fn ambient_dim(&self) -> usize;
    fn embed(&self, u: f64, v: f64) -> DVector<f64>;

    /// d×2 array of partial derivatives. Central differences unless overridden.
    fn jacobian(&self, u: f64, v: f64) -> DMatrix<f64> {
        finite_difference_jacobian(self, u, v, JACOBIAN_FD_STEP)
    }

    fn identifications(&self) -> Vec<EdgeGluing> {
        Vec::new()
    }

    /// Parameter margins `[u, v]` that grids keep from the domain boundary.
    fn grid_margin(&self) -> [f64; 2] {
        [0.0, 0.0]
    }
}

pub fn finite_difference_jacobian<S: Surface + ?Sized>(
    s: &S,
    u: f64,
    v: f64,
    h: f64,
) -> DMatrix<f64> {
    let du = (s.embed(u + h, v) - s.embed(u - h, v)) / (2.0 * h);
    let dv = (s.embed(u, v + h) - s.embed(u, v - h)) / (2.0 * h);
    DMatrix::from_columns(&[du, dv])
}

/// Unit sphere in R³, `u` polar angle in `[0, π]`, `v` azimuth in `[0, 2π]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSphere;

impl Surface for UnitSphere {
    fn name(&self) -> &str {
        "sphere"
    }
    fn domain(&self) -> Domain {
        Domain { u: (0.0, PI), v: (0.0, TAU) }
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.sin() * v.cos(), u.sin() * v.sin(), u.cos()])
    }
    fn jacobian(&self, u: f64, v: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            3,
            2,
            &[
                u.cos() * v.cos(),
                -u.sin() * v.sin(),
                u.cos() * v.sin(),
                u.sin() * v.cos(),
                -u.sin(),
                0.0,
            ],
        )
    }
    fn identifications(&self) -> Vec<EdgeGluing> {
        vec![EdgeGluing::periodic(
            "azimuth",
            EdgeSegment::new([0.0, TAU], [PI, TAU]),
            EdgeSegment::new([0.0, 0.0], [PI, 0.0]),
        )]
    }
    fn grid_margin(&self) -> [f64; 2] {
        [POLE_MARGIN, 0.0]
    }
}

/// Flat torus `(cos u, sin u, cos v, sin v)` in R⁴.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatTorus;

impl Surface for FlatTorus {
    fn name(&self) -> &str {
        "flat-torus"
    }
    fn domain(&self) -> Domain {
        Domain { u: (0.0, TAU), v: (0.0, TAU) }
    }
    fn ambient_dim(&self) -> usize {
        4
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u.cos(), u.sin(), v.cos(), v.sin()])
    }
    fn jacobian(&self, u: f64, v: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(4, 2, &[-u.sin(), 0.0, u.cos(), 0.0, 0.0, -v.sin(), 0.0, v.cos()])
    }
    fn identifications(&self) -> Vec<EdgeGluing> {
        torus_gluings()
    }
}

/// Torus of revolution in R³ with tube radius `minor` around a circle of
/// radius `major`.
#[derive(Debug, Clone, Copy)]
pub struct DonutTorus {
    pub major: f64,
    pub minor: f64,
}

impl Default for DonutTorus {
    fn default() -> Self {
        Self { major: 2.0, minor: 1.0 }
    }
}

impl Surface for DonutTorus {
    fn name(&self) -> &str {
        "torus"
    }
    fn domain(&self) -> Domain {
        Domain { u: (0.0, TAU), v: (0.0, TAU) }
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        let r = self.major + self.minor * v.cos();
        DVector::from_vec(vec![r * u.cos(), r * u.sin(), self.minor * v.sin()])
    }
    fn jacobian(&self, u: f64, v: f64) -> DMatrix<f64> {
        let r = self.major + self.minor * v.cos();
        let m = self.minor;
        DMatrix::from_row_slice(
            3,
            2,
            &[
                -r * u.sin(),
                -m * v.sin() * u.cos(),
                r * u.cos(),
                -m * v.sin() * u.sin(),
                0.0,
                m * v.cos(),
            ],
        )
    }
    fn identifications(&self) -> Vec<EdgeGluing> {
        torus_gluings()
    }
}

fn torus_gluings() -> Vec<EdgeGluing> {
    vec![
        EdgeGluing::periodic(
            "u-period",
            EdgeSegment::new([TAU, 0.0], [TAU, TAU]),
            EdgeSegment::new([0.0, 0.0], [0.0, TAU]),
        ),
        EdgeGluing::periodic(
            "v-period",
            EdgeSegment::new([0.0, TAU], [TAU, TAU]),
            EdgeSegment::new([0.0, 0.0], [TAU, 0.0]),
        ),
    ]
}

/// The plane `(u, v, 0)` in R³ over the unit square.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatPlane;

impl Surface for FlatPlane {
    fn name(&self) -> &str {
        "plane"
    }
    fn domain(&self) -> Domain {
        Domain::UNIT_SQUARE
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u, v, 0.0])
    }
    fn jacobian(&self, _u: f64, _v: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0])
    }
}

/// The unit square with its intrinsic flat metric and a list of edge gluings.
/// Fiber coordinates are the chart coordinates.
#[derive(Debug, Clone)]
pub struct GluedSquare {
    name: String,
    gluings: Vec<EdgeGluing>,
}

impl GluedSquare {
    pub fn new(name: impl Into<String>, gluings: Vec<EdgeGluing>) -> Self {
        Self { name: name.into(), gluings }
    }

    pub fn mobius() -> Self {
        Self::new("mobius", vec![EdgeGluing::mobius_twist()])
    }

    pub fn klein() -> Self {
        Self::new("klein", vec![EdgeGluing::mobius_twist(), EdgeGluing::side_identity()])
    }
}

impl Surface for GluedSquare {
    fn name(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> Domain {
        Domain::UNIT_SQUARE
    }
    fn ambient_dim(&self) -> usize {
        2
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        DVector::from_vec(vec![u, v])
    }
    fn jacobian(&self, _u: f64, _v: f64) -> DMatrix<f64> {
        DMatrix::identity(2, 2)
    }
    fn identifications(&self) -> Vec<EdgeGluing> {
        self.gluings.clone()
    }
}

type EmbedFn = dyn Fn(f64, f64) -> DVector<f64> + Send + Sync;

/// A user-supplied chart; its jacobian comes from central differences.
pub struct ChartFn {
    name: String,
    domain: Domain,
    ambient_dim: usize,
    embed: Box<EmbedFn>,
}

impl ChartFn {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        ambient_dim: usize,
        embed: impl Fn(f64, f64) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), domain, ambient_dim, embed: Box::new(embed) }
    }
}

impl Surface for ChartFn {
    fn name(&self) -> &str {
        &self.name
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    fn embed(&self, u: f64, v: f64) -> DVector<f64> {
        (self.embed)(u, v)
    }
}

/// Looks up a built-in surface by name.
pub fn builtin_surface(name: &str) -> Option<Box<dyn Surface>> {
    match name {
        "sphere" => Some(Box::new(UnitSphere)),
        "flat-torus" => Some(Box::new(FlatTorus)),
        "torus" => Some(Box::new(DonutTorus::default())),
        "plane" => Some(Box::new(FlatPlane)),
        "mobius" => Some(Box::new(GluedSquare::mobius())),
        "klein" => Some(Box::new(GluedSquare::klein())),
        _ => None,
    }
}
