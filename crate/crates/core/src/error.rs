use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset has no levels")]
    NoLevels,
    #[error("level 0 must hold exactly one element (the minimum), found {0}")]
    MinimumCount(usize),
    #[error("level {0} is empty")]
    EmptyLevel(usize),
    #[error("duplicate element id {0:?}")]
    DuplicateId(String),
    #[error("unknown element id {0:?}")]
    UnknownId(String),
    #[error("cover {lo:?} -> {hi:?} joins ranks {lo_rank} and {hi_rank}, not adjacent levels")]
    NonAdjacentCover {
        lo: String,
        hi: String,
        lo_rank: usize,
        hi_rank: usize,
    },
    #[error("cover {lo:?} -> {hi:?} listed twice")]
    DuplicateCover { lo: String, hi: String },
    #[error("element {0:?} below the top level has no upper cover")]
    NoUpperCover(String),
    #[error("element {0:?} above level 0 has no lower cover")]
    NoLowerCover(String),
    #[error("height {height} does not match {levels} levels")]
    HeightMismatch { height: usize, levels: usize },
    #[error("{bottom:?} is not below {top:?}")]
    NotComparable { bottom: String, top: String },
    #[error("top level holds {0} elements; an interval needs exactly one")]
    NotAnInterval(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("atomic sequence is empty")]
    Empty,
    #[error("first atomic number must be 1, got {0}")]
    FirstNotOne(u64),
    #[error("atomic numbers must be positive")]
    NonPositive,
    #[error("sequence decreases at position {index}: {prev} > {next}")]
    Decreasing { index: usize, prev: u64, next: u64 },
    #[error("a_{index} is not defined (finite sequence of length {len})")]
    Undefined { index: usize, len: usize },
    #[error("sequence has no constant tail")]
    NoTail,
    #[error("cannot parse atomic sequence: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("poset has {size} elements, above the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("canonical labeling explored more than {0} leaves")]
    SearchCap(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("level {level} has width {width}, expected 4")]
    Width { level: usize, width: usize },
    #[error("section is not a bipartite 2-regular graph on 4 + 4 vertices: {0}")]
    NotTwoRegular(String),
    #[error("atomic numbers are not of type (1,1,2,2,...): {0}")]
    WrongType(String),
    #[error("invalid letter {0:?} in section string (expected 1 or 2)")]
    Letter(char),
    #[error("section string {0:?} has two adjacent 2s")]
    AdjacentTwos(String),
    #[error("level {level} is outside the poset (height {height})")]
    Level { level: usize, height: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("a_{index} = {next} is not divisible by a_{prev_index} = {prev}")]
    NotDivisible {
        prev_index: usize,
        prev: u64,
        index: usize,
        next: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqCheckError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("head fails the compatibility condition: {0}")]
    Incompatible(String),
    #[error("atomic numbers do not follow (1,2,...,n-1,a_n): {0}")]
    Pattern(String),
    #[error("relation R is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("equivalence classes have sizes {sizes:?}, expected {expected}")]
    ClassSize { sizes: Vec<usize>, expected: usize },
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("base interval does not fit the target: {0}")]
    Base(String),
}
