use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("variable index {index} out of scope (context size {ctx})")]
    OutOfScope { index: usize, ctx: usize },
    #[error("duplicate operation name `{0}`")]
    DuplicateOp(String),
    #[error("name collision on `{0}` in coproduct (policy: reject)")]
    NameCollision(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("not a pattern: {0}")]
    NotAPattern(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("term is not ground: {0}")]
    NotGround(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
