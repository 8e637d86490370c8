use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlstError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {}", join_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("graph not connected")]
    Disconnected,

    #[error("exact mode terminal limit: {terminals} terminals (and {steiner_candidates} non-terminals) exceed limit {limit}")]
    ExactTerminalLimit {
        terminals: usize,
        steiner_candidates: usize,
        limit: usize,
    },

    /// A size guard on an exponential-time routine was exceeded.
    #[error("{what}: {actual} exceeds limit {limit}{}", hint.map(|h| format!(" ({h})")).unwrap_or_default())]
    Guard {
        what: &'static str,
        limit: usize,
        actual: usize,
        hint: Option<&'static str>,
    },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid level subset: {0}")]
    InvalidSubset(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("generator: {0}")]
    Generator(String),

    #[error("linear program: {0}")]
    Lp(String),
}

impl MlstError {
    pub(crate) fn guard(what: &'static str, limit: usize, actual: usize) -> Self {
        MlstError::Guard { what, limit, actual, hint: None }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        MlstError::Parse { line, msg: msg.into() }
    }

    /// True for errors caused by an exponential routine's size guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, MlstError::Guard { .. } | MlstError::ExactTerminalLimit { .. })
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, MlstError>;
