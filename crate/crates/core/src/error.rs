use thiserror::Error;

use crate::spaces::AxiomViolation;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally malformed input (non-square matrix, NaN entries, ...).
    #[error("format error: {0}")]
    Format(String),

    /// A distance matrix failed one or more metric axioms.
    #[error("metric axioms violated: {}", format_violations(.0))]
    Metric(Vec<AxiomViolation>),

    /// A configuration document failed to parse or validate.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

fn format_violations(v: &[AxiomViolation]) -> String {
    const SHOWN: usize = 5;
    let mut parts: Vec<String> = v.iter().take(SHOWN).map(|x| x.to_string()).collect();
    if v.len() > SHOWN {
        parts.push(format!("... and {} more", v.len() - SHOWN));
    }
    parts.join("; ")
}
