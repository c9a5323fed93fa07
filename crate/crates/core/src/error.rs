use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized (|a|^2+|b|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("operator is not flagged hermitian")]
    NonHermitianObservable,
    #[error("constraint cannot be satisfied: {0}")]
    ConstraintInfeasible(String),
    #[error("free phase `{0}` has no assignment")]
    UnresolvedSlot(String),
    #[error("neither handedness candidate gives [Sx,Sy] = +i Sz")]
    NoRightHandedCandidate,
    #[error("analyzer chain has no stages")]
    EmptyChain,
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol `{name}` at {position}")]
    UnknownSymbol { position: usize, name: String },
    #[error("expression degree {degree} exceeds the limit of {limit}")]
    DegreeOverflow { degree: u32, limit: u32 },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable snake_case code used in API envelopes.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotNormalized { .. } => "not_normalized",
            Error::ZeroVector => "zero_vector",
            Error::NonHermitianObservable => "non_hermitian_observable",
            Error::ConstraintInfeasible(_) => "constraint_infeasible",
            Error::UnresolvedSlot(_) => "unresolved_slot",
            Error::NoRightHandedCandidate => "no_right_handed_candidate",
            Error::EmptyChain => "empty_chain",
            Error::Syntax { .. } => "syntax_error",
            Error::UnknownSymbol { .. } => "unknown_symbol",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::Usage(_) => "usage_error",
        }
    }

    pub fn position(&self) -> Option<usize> {
        match self {
            Error::Syntax { position, .. } | Error::UnknownSymbol { position, .. } => Some(*position),
            _ => None,
        }
    }

    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}
