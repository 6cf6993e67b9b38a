use thiserror::Error;

/// Errors raised by the computation engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("invalid rank {0} (expected 1..=26)")]
    InvalidRank(usize),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("cannot parse word {text:?}: {reason}")]
    WordSyntax { text: String, reason: String },

    #[error("operation requires a nonempty word set")]
    EmptySet,

    #[error("partitions live on different spaces")]
    SpaceMismatch,

    #[error("space with {0} atoms exceeds the cap of {cap} atoms", cap = crate::exact_entropy::MAX_ATOMS)]
    SpaceTooLarge(usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("{0} is too large to factor")]
    FactorizationTooLarge(String),

    #[error("map does not preserve the measure")]
    NotMeasurePreserving,

    #[error("modulus {0} is not a prime below 2^15")]
    InvalidModulus(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coordinate {index} out of range ({len} coordinates)")]
    CoordinateOutOfRange { index: usize, len: usize },

    #[error("convolution kernel is zero")]
    ZeroKernel,

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("operation requires a scalar kernel (d_in = d_out = 1)")]
    NotScalar,

    #[error("window could not be certified: projected dimension lies in [{lower}, {upper}]")]
    Uncertified { lower: usize, upper: usize },

    #[error("ordering condition fails at step {0}")]
    OrderingConditionFailed(usize),

    #[error("pattern does not match the window: {0}")]
    PatternMismatch(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("map is not a group automorphism: {0}")]
    NotAutomorphism(String),

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("subgroup is not invariant under the action")]
    NotInvariant,

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("process does not support conditional entropy queries")]
    NoConditionalCapability,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
