use std::fmt;

use thiserror::Error;

/// Position of a token in an input file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize) -> Self {
        SourceSpan {
            file: None,
            line,
            column,
        }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}:{}", file, self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("arity mismatch for `{predicate}`: expected {expected}, found {found}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unsafe {0}")]
    Unsafe(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("universe of {size} elements exceeds the bound of {bound}")]
    UniverseTooLarge { size: usize, bound: usize },

    #[error("the program has no consistent answer set (it derives complementary literals)")]
    Inconsistent,

    #[error("core of an empty family of answer sets is undefined")]
    EmptyCore,
}

impl Error {
    pub(crate) fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        Error::Syntax {
            span,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
