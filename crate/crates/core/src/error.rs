use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field level mismatch: expected an element of GF(2^{expected}), got GF(2^{found})")]
    LevelMismatch { expected: u32, found: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported field size q = {0}")]
    UnsupportedQ(u64),

    #[error("invalid modulus {modulus:#x} for degree {degree}: {reason}")]
    InvalidModulus {
        degree: u32,
        modulus: u64,
        reason: &'static str,
    },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("facts file: {0}")]
    Facts(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
