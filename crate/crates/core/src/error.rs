use thiserror::Error;

use crate::lattice::Digit;

/// Errors raised by construction, validation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix parameters q1={q1}, q2={q2}: need 1 <= q1 <= q2")]
    InvalidParams { q1: u32, q2: u32 },

    #[error("unsupported radix {0}: signed expansions need 3 <= b <= 2^61")]
    InvalidRadix(u64),

    #[error("digit {digit} at index {index} is not in the residue system")]
    DigitOutOfRange { index: usize, digit: Digit },

    #[error("letter {0} is not in {{-1, 0, 1}}")]
    InvalidLetter(i64),

    #[error("index word ends with a zero letter")]
    TrailingZero,

    #[error("word of length {0} is too long to index (max {max})", max = crate::treemap::MAX_WORD_LEN)]
    WordTooLong(usize),

    #[error("index {0} is out of the supported range")]
    IndexOutOfRange(i64),

    #[error("enumeration would produce {requested} points (limit {limit})")]
    TooManyPoints { requested: u128, limit: u128 },

    #[error("inadmissible kick digit {kick}: {reason}; choose a nonzero kick from E_q1")]
    InadmissibleKick { kick: Digit, reason: String },

    #[error("target dimension {t} is outside [0, {max}]")]
    DimensionOutOfRange { t: f64, max: f64 },

    #[error("degenerate scale grid: {0}")]
    DegenerateScales(String),

    #[error("digit {digit} is outside [{lo}, {hi}]")]
    DigitSetOutOfRange { digit: i64, lo: i64, hi: i64 },

    #[error("generated set has two points on the vertical line x = {x}; the closed form needs one point per vertical line")]
    VerticalLineCollision { x: String },

    #[error("expected {expected} points, got {actual}")]
    Cardinality { expected: usize, actual: usize },

    #[error("pattern frequency {claimed} disagrees with the prefix average {observed}")]
    PatternFrequency { claimed: f64, observed: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
