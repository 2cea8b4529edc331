use alloc::string::String;
use core::fmt;

use crate::grid::Axis;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The envelopes of a monotone `β` could not bracket the requested level.
    BracketFailure {
        alpha: f64,
    },
    /// An initial-data or coefficient function returned NaN or ±∞.
    NonFiniteSample {
        index: usize,
        value: f64,
    },
    /// `λ_axis · L_g · L_β` exceeds 1/2.
    CflViolation {
        axis: Axis,
        product: f64,
    },
    GridMismatch,
    /// An error sequence passed to the EOC computation contained a negative or NaN entry.
    NonPositiveError {
        index: usize,
        value: f64,
    },
    /// A 1D reduction was requested for a problem whose data depends on `y`.
    DimensionalityMismatch,
    /// Structurally invalid model, grid or solver configuration.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BracketFailure { alpha } => {
                write!(f, "beta envelopes cannot bracket level {alpha}")
            }
            Error::NonFiniteSample { index, value } => {
                write!(f, "non-finite sample {value} at cell {index}")
            }
            Error::CflViolation { axis, product } => write!(
                f,
                "CFL violated along {axis:?}: lambda * L_g * L_beta = {product} > 1/2"
            ),
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NonPositiveError { index, value } => {
                write!(
                    f,
                    "error entry {index} is not a non-negative number: {value}"
                )
            }
            Error::DimensionalityMismatch => {
                f.write_str("problem data depends on y; no 1D reduction exists")
            }
            Error::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
