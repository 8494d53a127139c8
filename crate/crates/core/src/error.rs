use std::path::PathBuf;

use crate::geometry::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid spiral spec: {}", format_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error("{what} outside the domain of its closed form: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("coincident filaments between segments {0} and {1}")]
    CoincidentFilaments(usize, usize),

    #[error("Q undefined at {freq_hz} Hz: Re(Y11) = 0")]
    LosslessSingularity { freq_hz: f64 },

    #[error("every frequency point has Re(Y11) = 0, Q curve is empty")]
    EmptyCurve,

    #[error("expected {expected} network, got {found}")]
    WrongKind { expected: &'static str, found: &'static str },

    #[error("network is malformed: {0}")]
    MalformedNetwork(String),

    #[error("{0}")]
    InsufficientPoints(String),

    #[error("conversion failed at index {index} ({freq_hz} Hz): {what} is singular")]
    Conversion { index: usize, freq_hz: f64, what: &'static str },

    #[error("frequency grids differ: {0}")]
    GridMismatch(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("frame model has no constrained degrees of freedom")]
    Unconstrained,

    #[error("stiffness matrix is singular; unconstrained DOFs: {}", .0.join(", "))]
    Singular(Vec<String>),

    #[error("static solve residual {0:e} exceeds tolerance")]
    Residual(f64),

    #[error("invalid frame model: {0}")]
    InvalidFrame(String),

    #[error("unknown material '{0}'")]
    UnknownMaterial(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("{}: {}", v.field, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}
