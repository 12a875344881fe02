use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a pole of a special function.
    #[error("pole error: {0}")]
    Pole(String),

    /// Spline level outside the built range of a family.
    #[error("range error: requested level {requested}, family holds {available}")]
    Range { requested: usize, available: usize },

    /// A series truncated at the family depth would exceed its error budget.
    #[error("depth error: series at t={t} needs max_n >= {required}, family holds {available}")]
    Depth { t: f64, required: usize, available: usize },

    /// Evaluation below the support floor of a truncated family.
    #[error("coverage error: u={u:.3e} lies below the built support floor {floor:.3e}")]
    Coverage { u: f64, floor: f64 },

    /// Quadrature failed to reach the requested accuracy.
    #[error("quadrature error in {context}: estimated error {estimate:.3e} above target {target:.3e}")]
    Quadrature { context: &'static str, estimate: f64, target: f64 },

    /// Operation not defined for the given kernel variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Generic numerical failure with diagnostics.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Invalid run or simulation configuration.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure (spline cache files, output tables).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
