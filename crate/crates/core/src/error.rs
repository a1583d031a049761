use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("field does not decay at the grid boundary (|f| = {magnitude:.3e} > {tolerance:.3e})")]
    NotDecaying { magnitude: f64, tolerance: f64 },

    #[error("point {x} lies outside the grid [{x_min}, {x_max}]")]
    OutOfGrid { x: f64, x_min: f64, x_max: f64 },

    #[error("spectral parameter {re}{im:+}i is not admissible here: {reason}")]
    BadSpectralParameter { re: f64, im: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("branch continuation failed between contour nodes {from} and {to} (jump {jump:.3})")]
    Branch { from: usize, to: usize, jump: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn bad_lambda(lambda: num_complex::Complex64, reason: impl Into<String>) -> Self {
        Error::BadSpectralParameter {
            re: lambda.re,
            im: lambda.im,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
