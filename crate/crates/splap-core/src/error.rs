//! Error type shared by all modules.

/// Failure modes of the library. Variants mirror the mathematical structure:
/// `Nonexistence` is a theorem (gamma <= 1 has no half-line solution), not a
/// numerical breakdown, and callers are expected to branch on it.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The requested object provably does not exist (gamma <= 1 family).
    #[error("nonexistence: {0}")]
    Nonexistence(String),
    /// Input outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),
    /// Evaluation point outside the tabulated/geometric range.
    #[error("range: {0}")]
    Range(String),
    /// Adaptive integration failed to converge.
    #[error("quadrature: {0}")]
    Quadrature(String),
    /// Eigenvalue bracketing or shooting failure.
    #[error("eigen: {0}")]
    Eigen(String),
    /// Inconsistent configuration (mismatched params, bad keys).
    #[error("config: {0}")]
    Config(String),
    /// A required strict domination between functions fails on samples.
    #[error("domination: {0}")]
    Domination(String),
    /// Newton/continuation failure in the strip solver.
    #[error("solve: {0}")]
    Solve(String),
    /// A field that must be positive is not.
    #[error("positivity: {0}")]
    Positivity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
