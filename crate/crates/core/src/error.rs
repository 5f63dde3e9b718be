//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by solver operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input dimensions do not agree (message names the offending shapes).
    DimensionMismatch(String),
    /// A value that must be finite is NaN or infinite.
    NonFinite(String),
    /// An entry that must be strictly positive is zero or negative.
    NonPositiveEntry { what: &'static str, index: usize },
    /// The iterate left the open positive orthant.
    NonInteriorState,
    /// Dense factorization hit a pivot that is zero to working precision.
    SingularMatrix,
    /// Sampling from a tree whose total mass is zero.
    ZeroMassTree,
    /// Tree index out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// A zero vector where a direction or state was required.
    ZeroVector,
    /// Gradient-descent restoration did not reach the neighbourhood.
    RestorationFailed { steps: usize, final_g: f64 },
    /// All fidelity-check attempts of the simulated solver failed.
    RetriesExhausted { attempts: usize },
    /// No admissible step length at or above the search floor.
    NoFeasibleStep,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
            Error::NonPositiveEntry { what, index } => {
                write!(f, "{what}[{index}] must be strictly positive")
            }
            Error::NonInteriorState => write!(f, "state is not in the open positive orthant"),
            Error::SingularMatrix => write!(f, "matrix is singular to working precision"),
            Error::ZeroMassTree => write!(f, "sampling tree has zero total mass"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::ZeroVector => write!(f, "zero vector not allowed here"),
            Error::RestorationFailed { steps, final_g } => {
                write!(f, "restoration failed after {steps} steps (g = {final_g:e})")
            }
            Error::RetriesExhausted { attempts } => {
                write!(f, "all {attempts} solve attempts failed the fidelity check")
            }
            Error::NoFeasibleStep => write!(f, "no feasible step length above the search floor"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
