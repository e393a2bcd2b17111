use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("image list is not a bijection on 0..{degree}")]
    NotBijective { degree: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("group order {order} exceeds cap {cap}")]
    OrderExceedsCap { order: String, cap: u64 },

    #[error("index {index} exceeds cap {cap}")]
    IndexCapExceeded { index: String, cap: u64 },

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("action is not transitive")]
    Intransitive,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported field order q = {0}")]
    UnsupportedField(u32),

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("character table rejected: {0}")]
    InvalidTable(String),

    #[error("orthogonality violated for ({row}, {col}): expected {expected}, got {got}")]
    Orthogonality {
        kind: &'static str,
        row: usize,
        col: usize,
        expected: String,
        got: String,
    },

    #[error("class multiplication count is not a nonnegative integer: {0}")]
    NonIntegralCount(String),

    #[error("inadmissible family parameter: {0}")]
    Inadmissible(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
