use thiserror::Error;

/// Errors raised by the numerical layers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("divergence: contraction product {product:.6e} is not below 1")]
    Divergence { product: f64 },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Conditioning(_)
                | Error::Divergence { .. }
                | Error::Fit(_)
                | Error::Degenerate(_)
                | Error::Model(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
