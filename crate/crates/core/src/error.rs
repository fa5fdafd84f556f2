use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field order {p}^{n} exceeds the cap of {cap} elements")]
    FieldTooLarge { p: u32, n: u32, cap: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("defining set is not invariant under F_q^* scaling")]
    NotInvariant,
    #[error("family constraint violated: {0}")]
    FamilyConstraint(String),
    #[error("search space of {size} exceeds the cap of {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("non-exact division in weight formula: {0}")]
    InexactDivision(String),
    #[error("closed form mismatch: {0}")]
    Mismatch(String),
    #[error("generator matrix rank {rank} differs from the claimed dimension {claimed}")]
    RankDeficient { rank: usize, claimed: usize },
    #[error("table transcription produced a negative frequency: {0}")]
    NegativeFrequency(String),
    #[error("code is not two-weight (found {0} nonzero weights)")]
    NotTwoWeight(usize),
    #[error("code is not projective")]
    NotProjective,
    #[error("graph is not regular")]
    Irregular,
    #[error("graph is not connected")]
    Disconnected,
    #[error("common-neighbour counts are not constant over {0} pairs")]
    NotStronglyRegular(&'static str),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
