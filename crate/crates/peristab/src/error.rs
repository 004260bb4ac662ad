//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by mesh construction, tensor algebra, and force evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A shape tensor (K or L) is singular or too ill-conditioned to invert.
    /// Signals degenerate family geometry, e.g. collinear neighbors.
    #[error("singular shape tensor (condition number {cond:.3e} exceeds cap {cap:.3e})")]
    SingularShapeTensor { cond: f64, cap: f64 },

    /// A deformed bond length collapsed below the representable threshold,
    /// so negative powers of |Y|/|xi| would diverge.
    #[error("collapsed bond at node {node} -> neighbor {neighbor}: |Y|/|xi| = {ratio:.3e}")]
    CollapsedBond {
        node: usize,
        neighbor: usize,
        ratio: f64,
    },

    /// Tensor dimensions do not match the operation's contract.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation's precondition was violated by the caller.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Invalid problem or grid configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
