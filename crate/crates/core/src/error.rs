use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants map onto the CLI exit-code contract: combinatorial and
/// domain problems are usage-level, root/quadrature failures are numerical
/// law failures, and eigensolver failures have their own code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbalanced characteristic sequence: {ups} up-innovations vs {downs} returns")]
    UnbalancedSequence { ups: usize, downs: usize },

    #[error("prefix violation: -1 at position {position} has no open +1")]
    PrefixViolation { position: usize },

    #[error("parity violation at position {position}: {value} not allowed there")]
    ParityViolation { position: usize, value: i8 },

    #[error("enumeration cutoff exceeded: k = {k} > {cutoff}")]
    CutoffExceeded { k: usize, cutoff: usize },

    #[error("pillar table covers k <= {max_k}, but k = {k} was requested")]
    TableTooSmall { k: usize, max_k: usize },

    #[error("root selection failed at z = {re} + {im}i: {reason}")]
    RootSelection { re: f64, im: f64, reason: String },

    #[error("quadrature did not converge: error estimate {estimate:e} above {tolerance:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown distribution '{0}' (expected gaussian, rademacher or uniform)")]
    UnknownDistribution(String),

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    EigenNonConvergence { index: usize, iterations: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
