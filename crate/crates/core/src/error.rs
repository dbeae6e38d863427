use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value {value} encountered in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("point ({x}, {v}) lies outside the phase-space domain")]
    OutOfDomain { x: f64, v: f64 },

    #[error("charge neutrality violated: integral of rho - 1 is {residual:e} (tolerance {tolerance:e})")]
    NotNeutral { residual: f64, tolerance: f64 },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("numerical failure at step {step}: {source}")]
    Diverged {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed field dump: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
