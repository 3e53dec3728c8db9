use std::fmt;

use thiserror::Error;

/// One violated invariant of a boundary configuration or option set.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoAxes,
    UnsupportedDimension { n: usize },
    MissingLength { axis: usize },
    NonPositiveLength { axis: usize, length: f64 },
    LengthOnOpenAxis { axis: usize },
    MultipleOpenAxes { axes: Vec<usize> },
    CutoffCountMismatch { expected: usize, found: usize },
    BadCutoff { axis: usize, reason: &'static str },
    BadEpsilon { value: f64 },
    BadPvEpsilon { value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAxes => write!(f, "axes: at least one spatial axis is required"),
            Violation::UnsupportedDimension { n } => {
                write!(f, "axes: {n} spatial axes given, at most {} supported", crate::MAX_DIM)
            }
            Violation::MissingLength { axis } => {
                write!(f, "axes[{axis}].length: required for a compact axis")
            }
            Violation::NonPositiveLength { axis, length } => {
                write!(f, "axes[{axis}].length: must be finite and > 0, got {length}")
            }
            Violation::LengthOnOpenAxis { axis } => {
                write!(f, "axes[{axis}].length: an open axis has no length")
            }
            Violation::MultipleOpenAxes { axes } => {
                write!(f, "axes: at most one open axis allowed, found {axes:?}")
            }
            Violation::CutoffCountMismatch { expected, found } => {
                write!(f, "cutoff: expected {expected} per-axis entries, found {found}")
            }
            Violation::BadCutoff { axis, reason } => write!(f, "cutoff[{axis}]: {reason}"),
            Violation::BadEpsilon { value } => {
                write!(f, "epsilon: must be finite and > 0, got {value}")
            }
            Violation::BadPvEpsilon { value } => {
                write!(f, "pv_epsilon: must be finite and > 0, got {value}")
            }
        }
    }
}

/// Every violation found while checking a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("event has {found} spatial coordinates, configuration has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in spacetime event")]
    NonFiniteEvent,
    #[error("mode has zero frequency; the zero mode has no Fock normalization")]
    ZeroFrequency,
    #[error("boundary configuration has no zero mode")]
    NoZeroMode,
    #[error("open axes have a continuous spectrum and cannot be enumerated")]
    OpenAxisNotEnumerable,
    #[error("operation requires {0}")]
    Unsupported(&'static str),
    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },
    #[error("detector supports overlap: {0}")]
    OverlappingSupports(String),
    #[error("invalid detector: {0}")]
    InvalidDetector(String),
    #[error("invalid qubit state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
