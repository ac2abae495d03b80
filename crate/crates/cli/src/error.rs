use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScenarioError {
    #[error("{pos}: SyntaxError: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: UnknownName: `{name}`")]
    UnknownName { pos: Pos, name: String },
    #[error("{pos}: ParameterOutOfRange: {msg}")]
    ParameterOutOfRange { pos: Pos, msg: String },
    #[error("{pos}: DivisionByZero")]
    DivisionByZero { pos: Pos },
    #[error("{pos}: {source}")]
    Field { pos: Pos, source: derivlab_core::Error },
}

impl ScenarioError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ScenarioError::Syntax { pos, msg: msg.into() }
    }

    pub fn out_of_range(pos: Pos, msg: impl Into<String>) -> Self {
        ScenarioError::ParameterOutOfRange { pos, msg: msg.into() }
    }

    pub fn field(pos: Pos, source: derivlab_core::Error) -> Self {
        match source {
            derivlab_core::Error::DivisionByZero => ScenarioError::DivisionByZero { pos },
            derivlab_core::Error::ParameterOutOfRange(msg) => ScenarioError::ParameterOutOfRange { pos, msg },
            source => ScenarioError::Field { pos, source },
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ScenarioError::Syntax { pos, .. }
            | ScenarioError::UnknownName { pos, .. }
            | ScenarioError::ParameterOutOfRange { pos, .. }
            | ScenarioError::DivisionByZero { pos }
            | ScenarioError::Field { pos, .. } => *pos,
        }
    }

    /// Short name of the error class, as printed in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Syntax { .. } => "SyntaxError",
            ScenarioError::UnknownName { .. } => "UnknownName",
            ScenarioError::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            ScenarioError::DivisionByZero { .. } => "DivisionByZero",
            ScenarioError::Field { .. } => "FieldError",
        }
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;
