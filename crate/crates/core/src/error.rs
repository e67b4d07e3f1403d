use thiserror::Error;

/// Errors surfaced by every module of the crate.
///
/// Variant names double as the machine-readable error names printed by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("zero has no discrete logarithm")]
    ZeroHasNoLog,
    #[error("base {0} is not a primitive element")]
    NotPrimitive(u32),
    #[error("wrong number of operands for {op}: expected {expected}, got {got}")]
    Arity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("element {value} is outside the field of order {order}")]
    ElementOutOfRange { value: u64, order: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is rank deficient (rank {rank}, needed {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("topologies with global parities (h > 0) are not supported")]
    UnsupportedGlobalParities,
    #[error("operation requires a = 1 (got a = {0})")]
    UnsupportedColumnParities(usize),
    #[error("erasure pattern is empty")]
    EmptyPattern,
    #[error("invalid erasure pattern: {0}")]
    InvalidPattern(String),
    #[error("erasure pattern is not irreducible")]
    NotIrreducible,
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("erasure pattern is not correctable by this code")]
    Uncorrectable,
    #[error("known symbols violate the code's parity constraints")]
    InconsistentWord,

    #[error("parity-check matrix is not MDS")]
    NotMds,
    #[error("no code found: {0}")]
    NotFound(String),
    #[error("unsupported shape for this strategy: {0}")]
    UnsupportedShape(String),

    #[error("missing constant or parameter: {0}")]
    MissingConstant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable identifier used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "InvalidField",
            Error::DivisionByZero => "DivisionByZero",
            Error::MixedFields => "MixedFields",
            Error::ZeroHasNoLog => "ZeroHasNoLog",
            Error::NotPrimitive(_) => "NotPrimitive",
            Error::Arity { .. } => "Arity",
            Error::ElementOutOfRange { .. } => "ElementOutOfRange",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::Inconsistent => "Inconsistent",
            Error::InvalidTopology(_) => "InvalidTopology",
            Error::UnsupportedGlobalParities => "UnsupportedGlobalParities",
            Error::UnsupportedColumnParities(_) => "UnsupportedColumnParities",
            Error::EmptyPattern => "EmptyPattern",
            Error::InvalidPattern(_) => "InvalidPattern",
            Error::NotIrreducible => "NotIrreducible",
            Error::ResourceGuard(_) => "ResourceGuard",
            Error::Uncorrectable => "Uncorrectable",
            Error::InconsistentWord => "InconsistentWord",
            Error::NotMds => "NotMds",
            Error::NotFound(_) => "NotFound",
            Error::UnsupportedShape(_) => "UnsupportedShape",
            Error::MissingConstant(_) => "MissingConstant",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
