use thiserror::Error;

pub type Result<T> = std::result::Result<T, EvalError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("n-gram order must be at least 1")]
    ZeroOrder,

    #[error("empty {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("prediction/reference count mismatch: {predictions} predictions, {references} references")]
    PairingMismatch { predictions: usize, references: usize },

    #[error("context {context_id}: {source}")]
    Context {
        context_id: String,
        #[source]
        source: Box<EvalError>,
    },

    #[error("{0}")]
    Corpus(#[from] CorpusError),

    #[error("{0}")]
    Mismatch(String),
}

impl EvalError {
    pub(crate) fn in_context(self, context_id: &str) -> Self {
        EvalError::Context {
            context_id: context_id.to_owned(),
            source: Box::new(self),
        }
    }
}

/// A single problem found while reading a corpus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number, `None` for problems not tied to a line.
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for LineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("empty corpus")]
    Empty,

    #[error("{} validation error(s){}:\n{}", .errors.len(), if *.truncated { " (truncated)" } else { "" }, join_lines(.errors))]
    Invalid {
        errors: Vec<LineError>,
        truncated: bool,
    },
}

fn join_lines(errors: &[LineError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
