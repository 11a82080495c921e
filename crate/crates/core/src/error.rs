use thiserror::Error;

/// Errors shared by all gramdist operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("production rules contain a cycle involving symbol {0}")]
    CycleDetected(u32),
    #[error("rule references undeclared symbol {0}")]
    UnknownSymbol(u32),
    #[error("symbol {0} has an empty right-hand side")]
    EmptyProduction(u32),
    #[error("expansion length {len} exceeds cap {cap}")]
    ExpansionTooLarge { len: u64, cap: u64 },
    #[error("position {pos} out of range 1..={len}")]
    OutOfRange { pos: u64, len: u64 },
    #[error("input text is empty")]
    EmptyInput,
    #[error("reserved sentinel character already present in the alphabet")]
    SentinelInAlphabet,
    #[error("tau must be at least 1 (got {0})")]
    InvalidTau(u64),
    #[error("grammar is not in Chomsky normal form")]
    NotCnf,
    #[error("strings must have equal length ({0} vs {1})")]
    LengthMismatch(u64, u64),
    #[error("unsupported number of strings k={0}")]
    UnsupportedK(usize),
    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("distance cap must lie in 1..={max}, got {cap}")]
    InvalidCap { cap: u64, max: u64 },
    #[error("fragment length {len} exceeds the DIST cap {cap}")]
    FragmentTooLarge { len: u64, cap: u64 },
    #[error("instance too large for this operation ({0})")]
    TooLarge(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("group count must lie in 2..=k-1, got {0}")]
    InvalidGroups(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
