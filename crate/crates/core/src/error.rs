use std::fmt;

use thiserror::Error;

use crate::numeric::NumericError;
use crate::reader::Feature;

/// A 1-based line/column location in source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn new(line: usize, column: usize) -> Self {
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{pos}: lex error: {message}")]
    Lex { pos: Position, message: String },

    #[error("{pos}: parse error: {message}")]
    Parse { pos: Position, message: String },

    #[error("{}{} requires class/{} (current level is class/{current})", fmt_pos(.pos), .feature.description(), .feature.required_level())]
    Level {
        pos: Option<Position>,
        feature: Feature,
        current: u8,
    },

    /// Problems found while loading definitions: duplicates, bad class
    /// hierarchies, misplaced `this`.
    #[error("{}{message}", fmt_pos(.pos))]
    Definition {
        pos: Option<Position>,
        message: String,
    },

    #[error("{0}")]
    Runtime(String),

    #[error("{0}")]
    Numeric(#[from] NumericError),

    /// A big-bang world could not be started.
    #[error("big-bang: {0}")]
    Setup(String),

    #[error("step {step}: {source}")]
    World { step: usize, source: Box<Error> },

    /// An error raised while evaluating the top-level form at `pos`.
    #[error("{pos}: {source}")]
    At { pos: Position, source: Box<Error> },
}

fn fmt_pos(pos: &Option<Position>) -> String {
    pos.map(|p| format!("{p}: ")).unwrap_or_default()
}

impl Error {
    pub fn parse(pos: Position, message: impl Into<String>) -> Self {
        Error::Parse { pos, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Error::Runtime(message.into())
    }

    pub fn definition(pos: Option<Position>, message: impl Into<String>) -> Self {
        Error::Definition { pos, message: message.into() }
    }

    /// The language level a level error asks for.
    pub fn required_level(&self) -> Option<u8> {
        match self {
            Error::Level { feature, .. } => Some(feature.required_level()),
            Error::World { source, .. } | Error::At { source, .. } => source.required_level(),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
