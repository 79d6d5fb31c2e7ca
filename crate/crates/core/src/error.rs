use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown objective `{0}`")]
    UnknownObjective(String),

    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },

    #[error("minimizer {x} lies outside the domain [{lo}, {hi}]")]
    MinimizerOutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("objective returned a non-finite value at x = {x}")]
    NonFiniteObjective { x: f64 },

    #[error("position list is empty")]
    EmptyPositions,

    #[error("length mismatch: {left} positions vs {right} weights")]
    LengthMismatch { left: usize, right: usize },

    #[error("position {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("non-finite position produced at step {step}")]
    NonFinitePosition { step: usize },

    #[error("particle left the domain by {excess:e} at t = {t}")]
    DomainExcursion { t: f64, excess: f64 },

    #[error("invariant `{name}` violated at t = {t}: residual {residual:e}")]
    InvariantViolation {
        name: &'static str,
        t: f64,
        residual: f64,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("objective has no known minimizer")]
    MissingMinimizer,

    #[error("minimizer {0} lies on the domain boundary; certificates need an interior minimizer")]
    BoundaryMinimizer(f64),

    #[error("table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn params(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
