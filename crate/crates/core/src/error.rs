use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("variable error: {0}")]
    Variable(String),
    #[error("rational function error: {0}")]
    Rational(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("unknown basis label {0:?}")]
    UnknownLabel(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("nonterminating operator series: {0}")]
    Nonterminating(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("construction error: {0}")]
    Construction(String),
    /// The computation needs data above the instance cutoff.
    #[error("window insufficient: {message} ({needed} would suffice)")]
    WindowInsufficient { message: String, needed: String },
    #[error("document error: {0}")]
    Document(String),
    #[error("empty sample set: {0}")]
    EmptySamples(String),
}
