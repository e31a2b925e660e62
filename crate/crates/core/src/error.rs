use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("contract violation: {0}")]
    Contract(String),
    /// An importance weight became infinite or undefined.
    #[error("divergent importance weight at sample {index} (D = {d})")]
    DivergentWeight { index: usize, d: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
