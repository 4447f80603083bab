use thiserror::Error;

/// Errors raised by the model library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function or parameter space.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested quantity is undefined at this point (e.g. a ratio with a zero denominator).
    #[error("singularity: {0}")]
    Singularity(String),

    /// A caller-supplied option is invalid.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input data could not be ingested.
    #[error("data error: {0}")]
    Data(String),

    /// Numerical fitting failed.
    #[error("fit failure: {0}")]
    Fit(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}
