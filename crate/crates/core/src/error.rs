use thiserror::Error;

/// Errors raised by the sand pile laboratory.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("rule parameter must be at least 2, got {0}")]
    InvalidParameter(u32),

    #[error("column {column} holds slope {slope} < {d} and cannot fire")]
    NotFireable { column: usize, slope: u32, d: u32 },

    #[error("firing budget {budget} exhausted; stabilization did not terminate")]
    BudgetExhausted { budget: u64 },

    #[error("avalanche {k} fires column {column} more than once")]
    RepeatedColumn { k: u64, column: usize },

    #[error("interval {interval} lies below the type threshold; first valid interval is {first_valid}")]
    BelowTypeThreshold { interval: usize, first_valid: usize },

    #[error("configuration is not stable for D={d}")]
    NotStable { d: u32 },

    #[error("letter {letter} outside alphabet 0..{alphabet}")]
    LetterOutOfAlphabet { letter: u8, alphabet: u8 },

    #[error("last run size {y} exceeds the bound x+1={max}")]
    RunSizeOutOfRange { y: usize, max: usize },

    #[error("transition recursion exceeded guard depth {0}")]
    TransitionGuard(usize),

    #[error("basic word enumeration exceeded word length guard {0}")]
    EnumerationGuard(usize),

    #[error("iterated image did not reach an alternating prefix within {0} rounds")]
    WaveStepGuard(usize),

    #[error("snapshot for grain count {0} was not retained; record with a wider snapshot policy")]
    MissingSnapshot(u64),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
