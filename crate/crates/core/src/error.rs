use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("grids are not nested: fine {fine:?} vs coarse {coarse:?}")]
    NotNested {
        fine: (usize, usize),
        coarse: (usize, usize),
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("linear solver failed after {iterations} iterations (relative residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },
    #[error("non-finite values in field `{0}`")]
    NonFinite(String),
    #[error("no stable junction: {0}")]
    NoJunction(String),
    #[error("angle fit failed: {0}")]
    Fit(String),
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}
