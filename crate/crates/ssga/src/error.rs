//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph is invalid:\n{0}")]
    InvalidGraph(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("tokens are not composable: target of `{right}` is {right_target} but domain of `{left}` is {left_domain}")]
    NonComposableTokens {
        left: String,
        left_domain: String,
        right: String,
        right_target: String,
    },

    #[error("word with domain {word_domain} cannot act on {target} with range {range}")]
    NonComposableAction {
        word_domain: String,
        target: String,
        range: String,
    },

    #[error("path is not composable at position {position}: range of `{edge}` is {range}, expected {expected}")]
    BrokenPath {
        position: usize,
        edge: String,
        range: String,
        expected: String,
    },

    #[error("out-degree is not constant (per-vertex profile {profile}); this operation needs |vE^1| = p >= 2 for every vertex")]
    NonConstantDegree { profile: String },

    #[error("caps must be positive")]
    InvalidCaps,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state cap {cap} exceeded while exploring restriction states")]
    StateCapExceeded { cap: usize },

    #[error("action rules are invalid:\n{0}")]
    InvalidAction(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
