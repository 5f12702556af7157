use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by frame, atlas and bundle operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame is not Parseval (residual {residual:.3e})")]
    NotParseval { residual: f64 },

    #[error("frame operator is rank deficient (smallest eigenvalue {smallest:.3e})")]
    RankDeficient { smallest: f64 },

    #[error("seed array is numerically singular{}", at_index(*index))]
    SingularSeed { index: Option<usize>, pivot: f64 },

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("projector is not symmetric idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("vectors are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("point is not on the unit sphere (norm {norm})")]
    NotOnSphere { norm: f64 },

    #[error("parameter ({u}, {v}) is outside the domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("jacobian is rank deficient at ({u}, {v})")]
    RankDeficientJacobian { u: f64, v: f64 },

    #[error("missing edge samples: {0}")]
    MissingEdgeSamples(String),

    #[error("invalid gluing: {0}")]
    InvalidGluing(String),

    #[error("loop is not closed (residual {residual:.3e})")]
    NotClosed { residual: f64 },

    #[error("sample {index}: {source}")]
    AtSample { index: usize, source: Box<Error> },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

fn at_index(index: Option<usize>) -> String {
    match index {
        Some(i) => format!(" at sample {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Numerical failures, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        if let Error::AtSample { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::SingularSeed { .. }
                | Error::RankDeficient { .. }
                | Error::RankDeficientJacobian { .. }
                | Error::NotParseval { .. }
                | Error::NotOrthonormal { .. }
                | Error::NotIdempotent { .. }
                | Error::NotClosed { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidFrame(_) => "InvalidFrame",
            Error::NotParseval { .. } => "NotParseval",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::SingularSeed { .. } => "SingularSeed",
            Error::BadShape(_) => "BadShape",
            Error::NotIdempotent { .. } => "NotIdempotent",
            Error::NotOrthonormal { .. } => "NotOrthonormal",
            Error::NotOnSphere { .. } => "NotOnSphere",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::RankDeficientJacobian { .. } => "RankDeficientJacobian",
            Error::MissingEdgeSamples(_) => "MissingEdgeSamples",
            Error::InvalidGluing(_) => "InvalidGluing",
            Error::NotClosed { .. } => "NotClosed",
            Error::AtSample { source, .. } => source.kind(),
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }

    pub(crate) fn at_sample(self, index: usize) -> Self {
        match self {
            Error::SingularSeed { pivot, .. } => Error::SingularSeed { index: Some(index), pivot },
            e @ Error::AtSample { .. } => e,
            e => Error::AtSample { index, source: Box::new(e) },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
