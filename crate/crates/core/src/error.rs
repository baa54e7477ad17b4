//! Crate-wide error type.

use crate::analysis::PhaseType;
use crate::statesmith::InvariantTarget;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ring too short: {0} sites, minimum is 5")]
    TooShort(usize),
    #[error("ring too long: {0} sites, maximum is 64")]
    TooLong(usize),
    #[error("non-binary symbol {symbol:?} at position {position}")]
    NonBinarySymbol { position: usize, symbol: char },
    #[error("empty pattern")]
    EmptyPattern,
    #[error("pattern length {pattern} exceeds ring length {ring}")]
    PatternTooLong { pattern: u32, ring: u32 },
    #[error("unknown rule name {0:?} (expected rule1, ex1, ex2 or table:...)")]
    UnknownName(String),
    #[error("malformed rule table {0:?} (expected 16 comma-separated integers)")]
    MalformedRuleTable(String),
    #[error("flux entry {value} at table index {index} is outside {{-1, 0, 1}}")]
    FluxOutOfRange { index: usize, value: i64 },
    #[error("step produced non-binary value {value} at site {site}; the flux table is not a particle rule on this state")]
    NonBinaryState { site: u32, value: i8 },
    #[error("step budget {budget} exhausted before the trajectory closed a cycle")]
    StepBudgetExceeded { budget: u64 },
    #[error("wrong phase: operation requires {expected}, state classifies as {actual}")]
    WrongPhase {
        expected: PhaseType,
        actual: PhaseType,
    },
    #[error("L={requested} exceeds the exhaustive bound {bound}")]
    BoundTooLarge { requested: u32, bound: u32 },
    #[error("invalid length range {l_min}..={l_max} (need 5 <= lmin <= lmax)")]
    InvalidLengthRange { l_min: u32, l_max: u32 },
    #[error("no ring realizes the target {0}")]
    Infeasible(InvariantTarget),
    #[error("occupation probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(crate::Rat),
    #[error("intermediate value exceeds 64-bit exact arithmetic")]
    ArithmeticOverflow,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("CSV parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
