//! Crate-wide error type.
//!
//! Every fallible public operation returns [`SswError`]. The CLI maps these
//! onto process exit codes: convergence failures exit 2, invalid
//! configuration (including oversized exact-diagonalization requests) exits
//! 3, and verification mismatches exit 4.

use thiserror::Error;

/// Errors produced by model construction, quadrature, scans, and the
/// exact-diagonalization oracle.
#[derive(Debug, Error)]
pub enum SswError {
    /// Chain parameters violate a domain constraint (J > 0, B >= 0, T > 0,
    /// all values finite).
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),

    /// The adaptive quadrature hit its node budget before the doubling
    /// estimate met the requested tolerance.
    #[error(
        "quadrature failed to converge: {max_nodes} nodes reached, \
         last refinement delta {last_delta:e} above tolerance {tolerance:e}"
    )]
    NonConvergence {
        max_nodes: usize,
        last_delta: f64,
        tolerance: f64,
    },

    /// Quadrature configuration is unusable (non-positive tolerance, zero
    /// node counts, max below initial).
    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    /// Scan axes are empty, non-finite, not strictly increasing, or out of
    /// the physical domain.
    #[error("invalid scan axes: {0}")]
    InvalidAxes(String),

    /// A contour was requested on a grid with no interior cells.
    #[error("grid has no interior cells to contour")]
    EmptyGrid,

    /// Pair correlators are implemented for separations 1 and 2 only.
    #[error("unsupported pair separation {0}: only R = 1 and R = 2 are implemented")]
    UnsupportedSeparation(usize),

    /// The diagonal minor (1+zz)^2 - 4m^2 of the two-site density matrix
    /// came out negative beyond rounding, so the state is unphysical.
    #[error("two-site density matrix has negative diagonal minor {0:e}")]
    NegativeVy(f64),

    /// Exact diagonalization was asked for more sites than the dense
    /// 2^N x 2^N representation supports.
    #[error("chain of {0} sites exceeds the exact-diagonalization limit")]
    SizeLimit(usize),

    /// Operator dimensions disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A density matrix failed a sanity check (trace, Hermiticity, size).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// The dense Hermitian eigensolver did not converge.
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),

    /// A signed branch sum lost its significant digits, or a degenerate
    /// configuration would need more enumeration than f64 arithmetic can
    /// repay.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A config file or serialized grid could not be parsed.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SswError>;
