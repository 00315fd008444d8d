use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis was driven through an invalid state transition.
    #[error("state error for hypothesis {index}: {msg}")]
    State { index: usize, msg: String },

    /// Submissions must arrive with nondecreasing timestamps.
    #[error("out-of-order timestamp {got} (last accepted {last})")]
    OutOfOrder { got: u64, last: u64 },

    /// The sample cannot produce a test statistic (zero pooled variance, too few points).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }

    pub(crate) fn state(index: usize, msg: impl Into<String>) -> Self {
        Error::State { index, msg: msg.into() }
    }
}
