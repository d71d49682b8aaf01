use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum OrliczError {
    /// An argument fell outside the operation's domain (negative, non-finite,
    /// epsilon out of (0,1), non-positive tolerance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// `sup {{ b*t - G(t) }}` kept growing past the expansion cap, so the
    /// complementary function is unbounded at this argument.
    #[error("unbounded conjugate at b = {b}: objective still increasing at t = {reached:e}")]
    UnboundedConjugate { b: f64, reached: f64 },

    /// The candidate function violates H1 (e.g. vanishes on an interval or
    /// fails to increase), so it is not an Orlicz function.
    #[error("degenerate Orlicz function: {0}")]
    Degenerate(String),

    /// Two grid functions live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A quadrature node produced a non-finite value.
    #[error("non-finite value at cell {index} (x = {x}): {context}")]
    NonFinite {
        index: usize,
        x: f64,
        context: String,
    },

    /// A bracketing loop hit its expansion cap before enclosing the target.
    #[error("bracket expansion exceeded cap: {0}")]
    BracketCap(String),

    /// Scalar root finding did not converge.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// A sequence specification is internally inconsistent.
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    /// Malformed grid-function CSV input.
    #[error("csv parse error: {0}")]
    Csv(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, OrliczError>;
