use thiserror::Error;

use crate::fincat::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid category `{name}`: {report}")]
    InvalidCategory {
        name: String,
        report: ValidationReport,
    },

    #[error("invalid functor: {0}")]
    InvalidFunctor(ValidationReport),

    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("base categories differ: `{0}` vs `{1}`")]
    BaseMismatch(String, String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("resource budget exceeded while {what} (limit {limit})")]
    Budget { what: String, limit: usize },

    #[error("construction refused: {0}")]
    Refused(String),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
