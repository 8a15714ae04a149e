//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("conductor {requested} exceeds cap {cap} (HOPFGROUP_MAX_CONDUCTOR)")]
    ConductorCap { requested: u64, cap: u64 },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("element not in group: {0}")]
    Element(String),

    #[error("level {level} out of range for group {group}")]
    LevelRange { level: i64, group: String },

    #[error("mixed groups: {0} vs {1}")]
    MixedGroups(String, String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("window leakage, image escapes the truncation window at cosets: {0}")]
    Leakage(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short machine code used by the CLI to distinguish error classes.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DIVZERO",
            Error::ConductorCap { .. } => "CONDUCTOR",
            Error::Syntax { .. } => "SYNTAX",
            Error::Element(_) => "ELEM",
            Error::LevelRange { .. } => "LEVEL",
            Error::MixedGroups(..) => "GROUP",
            Error::Unsupported(_) => "UNSUPPORTED",
            Error::Leakage(_) => "LEAKAGE",
            Error::Shape(_) => "SHAPE",
            Error::Validation(_) => "VALIDATE",
            Error::Usage(_) => "USAGE",
            Error::Overflow(_) => "OVERFLOW",
            Error::Io(_) => "IO",
        }
    }
}
