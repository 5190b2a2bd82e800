use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error(
        "context mismatch: {left} (g={left_g}, n={left_n}) vs {right} (g={right_g}, n={right_n})"
    )]
    ContextMismatch {
        left: String,
        left_g: usize,
        left_n: String,
        right: String,
        right_g: usize,
        right_n: String,
    },

    #[error("class has {got} coefficients, expected {expected} (g + 1)")]
    ClassLength { expected: usize, got: usize },

    #[error("invalid transform spec: {0}")]
    InvalidSpec(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("class lies in the kernel of the central charge (Z = 0); phase undefined")]
    KernelClass,

    #[error("central charge value {0} is not in H ∪ R_{{<0}}")]
    NotHeartValue(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
