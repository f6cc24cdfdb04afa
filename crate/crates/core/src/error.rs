use thiserror::Error;

#[derive(Debug, Error)]
pub enum GbcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("metric is not strongly convex: {0}")]
    MetricDomain(String),
    #[error("chart error: {0}")]
    Chart(String),
    #[error("series truncated: {0}")]
    Truncation(String),
    #[error("vector field too small: {0}")]
    Excision(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GbcError>;
