use thiserror::Error;

/// Everything that can go wrong while building states, blocks or samplers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("k must have at least one entry")]
    EmptyWeight,

    #[error("k is not weakly decreasing: k_{i} = {left} < k_{next} = {right}", next = .i + 1)]
    NotDecreasing { i: usize, left: i64, right: i64 },

    /// `rel` is the violated inequality in human-readable form, e.g. `m_2 <= k_1`.
    #[error("interlacing violated: requires {rel} (got {detail})")]
    NotInterlacing { rel: String, detail: String },

    #[error("omega index out of range: r_{i} = {value} not in 0..={max}")]
    OmegaOutOfRange { i: usize, value: i64, max: i64 },

    #[error("offset w = {w} is below the minimum {min} for this k")]
    OffsetTooSmall { w: i64, min: i64 },

    #[error("state is not in P: s_m = {s_m} but s_k = {s_k}")]
    NotInP { s_m: i64, s_k: i64 },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("{what} exceeds the cap {cap} (got {got})")]
    Resource { what: &'static str, cap: usize, got: usize },

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("mechanism unavailable: {0}")]
    MechanismUnavailable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
