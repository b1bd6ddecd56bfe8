use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Array lengths do not match the declared grid size.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value violates a type invariant (p <= 1, h <= 0, ...).
    #[error("invalid data: {0}")]
    Invalid(String),

    /// Expression source text could not be parsed.
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Runtime evaluation failure (division by zero, 0^negative, ...).
    #[error("evaluation error: {0}")]
    Eval(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {err:e})")]
    Quadrature { tol: f64, err: f64 },

    /// An operation was called outside its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The energy fell below the divergence floor or the iterates left the
    /// admissible ball: the instance is not coercive along the search path.
    #[error("anti-coercive detected: {0}")]
    AntiCoercive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
