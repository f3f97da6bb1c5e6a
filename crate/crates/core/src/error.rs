use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a singular point (e.g. a kernel on its diagonal).
    #[error("singular evaluation: {0}")]
    Singularity(String),
    /// Invalid scene or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A quadrature failed to reach its accuracy target.
    #[error("numerical accuracy not reached ({context}): residual estimate {residual:e}")]
    Accuracy { context: String, residual: f64 },
    /// A linear system could not be solved.
    #[error("linear solver failed: {message} (condition estimate {condition:e})")]
    Solver { message: String, condition: f64 },
    /// Mismatched shapes between inputs that must agree.
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = core::result::Result<T, Error>;
