use std::fmt;

use aksz::AlgebraError;
use serde::Serialize;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
    DegreeMismatch,
    Semantic,
    Io,
}

/// Input error with an optional position and a one-line fix hint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelError {
    pub kind: ErrorKind,
    pub pos: Option<Pos>,
    pub message: String,
    pub hint: String,
}

impl ModelError {
    pub fn new(kind: ErrorKind, pos: Option<Pos>, message: impl Into<String>, hint: impl Into<String>) -> Self {
        ModelError {
            kind,
            pos,
            message: message.into(),
            hint: hint.into(),
        }
    }

    pub fn lexical(pos: Pos, message: &str, hint: &str) -> Self {
        Self::new(ErrorKind::Lexical, Some(pos), message, hint)
    }

    pub fn syntax(pos: Pos, message: impl Into<String>, hint: impl Into<String>) -> Self {
        Self::new(ErrorKind::Syntax, Some(pos), message, hint)
    }

    pub fn semantic(pos: Pos, message: impl Into<String>, hint: impl Into<String>) -> Self {
        Self::new(ErrorKind::Semantic, Some(pos), message, hint)
    }

    pub fn algebra(pos: Pos, e: AlgebraError) -> Self {
        Self::semantic(pos, e.to_string(), "check the declaration against the constructor's documented arguments")
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Io, None, message, "check the path")
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.pos {
            write!(f, "{p}: ")?;
        }
        write!(f, "{}", self.message)?;
        if !self.hint.is_empty() {
            write!(f, "\n  hint: {}", self.hint)?;
        }
        Ok(())
    }
}

impl std::error::Error for ModelError {}
