use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("validity: {0}")]
    Validity(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("fit: {0}")]
    Fit(String),
    #[error("division by zero: {0}")]
    Division(String),
    #[error("shooting diverged after {iterations} iterations (residuals {r_transversality:e}, {r_time:e})")]
    ShootingDivergence {
        iterations: usize,
        r_transversality: f64,
        r_time: f64,
    },
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn validity(msg: impl Into<String>) -> Self {
        Error::Validity(msg.into())
    }
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
