use thiserror::Error;

/// Errors produced by the simulator, the circuit tooling and the grader.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QlabError {
    /// Caller supplied an argument that violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A request exceeds a fixed size limit of the simulator.
    #[error("capacity exceeded: {what} is {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Operation is not valid for the circuit's execution mode.
    #[error("mode error: {0}")]
    Mode(String),

    /// A document could not be parsed. `context` names the source and position.
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

impl QlabError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        QlabError::InvalidInput(msg.into())
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        QlabError::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = QlabError> = std::result::Result<T, E>;
