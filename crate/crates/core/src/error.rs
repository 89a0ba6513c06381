use crate::seg::Segment;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid segment: lo={lo} > hi={hi}")]
    InvalidSegment { lo: i64, hi: i64 },

    #[error("segment {0} too short for the star combination (need at least 3 points)")]
    StarTooShort(Segment),

    #[error("cannot parse segment from {0:?} (expected \"m..n\")")]
    SegmentParse(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("size budget exceeded: {what} has size {size}, limit {limit}")]
    SizeBudget {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("invalid Eichler pair ({i},{j}) at depth {depth}: need i+j <= depth")]
    InvalidEichlerPair { i: u32, j: u32, depth: u32 },

    #[error("pivot {pivot} outside segment {segment}")]
    PivotOutside { pivot: i64, segment: Segment },

    #[error("segment {segment} does not fit at depth {depth}")]
    DepthOverflow { segment: Segment, depth: u32 },

    #[error("base subgroup ({bi},{bj}) is not contained in ({hi},{hj})")]
    BaseNotContained { bi: u32, bj: u32, hi: u32, hj: u32 },

    #[error("segment {0} is not contained in the ambient range {1}")]
    OutsideAmbient(Segment, Segment),

    #[error("conditioning segment {0} keeps fewer than 2 points")]
    ConditioningTooShort(Segment),

    #[error("index hypothesis m < m' < n < n' violated by ({m},{m1},{n},{n1})")]
    IndexHypothesis { m: i64, m1: i64, n: i64, n1: i64 },

    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    #[error("singular Gram submatrix on span {0:?}")]
    SingularGram(Vec<i64>),

    #[error("weight {0} unsupported (need even k >= 4)")]
    UnsupportedWeight(u32),

    #[error("n={n} is not coprime to the level {level}")]
    NotCoprime { n: u64, level: u64 },

    #[error("level {0} is not cubefull")]
    NotCubefull(u64),

    #[error("tolerance {tol} unreachable within budget ({detail})")]
    ToleranceUnreachable { tol: f64, detail: String },

    #[error("cache header mismatch: expected \"{expected}\", found \"{found}\"")]
    CacheVersion { expected: String, found: String },

    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
