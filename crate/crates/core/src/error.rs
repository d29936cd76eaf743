use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank {0} is outside the supported range 1..=26")]
    UnsupportedRank(usize),
    #[error("generator {index} exceeds declared rank {rank}")]
    LetterOutOfRank { index: usize, rank: usize },
    #[error("invalid character {0:?} in word")]
    InvalidChar(char),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("pattern must be non-empty")]
    EmptyPattern,
    #[error("word must be non-empty")]
    EmptyWord,
    #[error("expression parse error at byte {pos}: {msg}")]
    ExprParse { pos: usize, msg: String },
    #[error("homogenization did not stabilize within horizon {horizon} for pattern {pattern}")]
    NonStabilization { pattern: String, horizon: usize },
    #[error("word {0} is not cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("invalid letter order {0:?}")]
    InvalidOrder(String),
    #[error("operation requires rank at least {required}, got {rank}")]
    RankTooSmall { required: usize, rank: usize },
    #[error("unknown Nielsen move {0:?}")]
    UnknownMove(String),
    #[error("word {0} is a power of b; use the b-power rewrite")]
    BPower(String),
    #[error("b-power exponent must be positive, got {0}")]
    NonPositiveExponent(i64),
    #[error("non-overlapping term {0} cannot be pulled back through a Nielsen word")]
    NonOverlappingTerm(String),
    #[error("word set is not independent")]
    NotIndependent,
    #[error("invalid replacement pair: {0}")]
    InvalidReplacementPair(String),
    #[error("invalid local transformation: {0}")]
    InvalidLocal(String),
    #[error("invalid wobbling map: {0}")]
    InvalidWobble(String),
    #[error("permutation is not a bijection on its support")]
    NotBijective,
    #[error("invalid map spec: {0}")]
    InvalidSpec(String),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedRank(_) => "unsupported_rank",
            Error::LetterOutOfRank { .. } => "letter_out_of_rank",
            Error::InvalidChar(_) => "invalid_char",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::EmptyPattern => "empty_pattern",
            Error::EmptyWord => "empty_word",
            Error::ExprParse { .. } => "expr_parse",
            Error::NonStabilization { .. } => "non_stabilization",
            Error::NotCyclicallyReduced(_) => "not_cyclically_reduced",
            Error::InvalidOrder(_) => "invalid_order",
            Error::RankTooSmall { .. } => "rank_too_small",
            Error::UnknownMove(_) => "unknown_move",
            Error::BPower(_) => "b_power",
            Error::NonPositiveExponent(_) => "non_positive_exponent",
            Error::NonOverlappingTerm(_) => "non_overlapping_term",
            Error::NotIndependent => "not_independent",
            Error::InvalidReplacementPair(_) => "invalid_replacement_pair",
            Error::InvalidLocal(_) => "invalid_local",
            Error::InvalidWobble(_) => "invalid_wobble",
            Error::NotBijective => "not_bijective",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::UnknownCheck(_) => "unknown_check",
        }
    }
}
