use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("empty intersection of dates across inputs")]
    EmptyIntersection,

    #[error("intraday grid is empty")]
    EmptyGrid,

    #[error("bar {index} violates low <= min(open, close) <= max(open, close) <= high")]
    InvalidBar { index: usize },

    #[error("bandwidth {bandwidth} too large for a grid with {bars} bars")]
    Bandwidth { bandwidth: usize, bars: usize },

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate variance: series is constant")]
    DegenerateVariance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state at index {index}")]
    NumericalOverflow { index: usize },

    #[error("optimizer did not converge after all starts (best mean log-likelihood {best_mean_loglik:.6}, gradient norm {grad_norm:.3e})")]
    NonConvergence {
        best_natural: Vec<f64>,
        best_mean_loglik: f64,
        grad_norm: f64,
    },

    #[error("ill-conditioned Hessian (condition number {condition:.3e})")]
    Conditioning { condition: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, used in error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSeries(_) => "invalid_series",
            Error::Alignment(_) => "alignment",
            Error::EmptyIntersection => "empty_intersection",
            Error::EmptyGrid => "empty_grid",
            Error::InvalidBar { .. } => "invalid_bar",
            Error::Bandwidth { .. } => "bandwidth",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::DegenerateVariance => "degenerate_variance",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NumericalOverflow { .. } => "numerical_overflow",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Conditioning { .. } => "conditioning",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
