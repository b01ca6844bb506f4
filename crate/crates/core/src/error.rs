use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("scope error: {0}")]
    Scope(String),
    #[error("capability error: {0}")]
    Capability(String),
    /// Characteristic 2 with a generic mod-p reduction: the socle description needs p != 2.
    #[error("outside hypotheses: {0}")]
    OutsideHypotheses(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Domain(_) => "domain",
            Error::Scope(_) => "scope",
            Error::Capability(_) => "capability",
            Error::OutsideHypotheses(_) => "outside_hypotheses",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
