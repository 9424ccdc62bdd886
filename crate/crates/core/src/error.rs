use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("partial quotient {index} cannot be certified at the available precision")]
    PrecisionExhausted { index: usize },
    #[error("expansion of a rational number terminates after {terms} terms")]
    Terminated { terms: usize },
    #[error("evaluation point {angle} lies on a zero of the product")]
    SingularPoint { angle: f64 },
    #[error("convergent denominator {q} exceeds the cap {cap}")]
    CapExceeded { q: String, cap: String },
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("outside the domain of the formula: {0}")]
    OutOfDomain(String),
    #[error("orbit passes through a zero of c at phase {phase}")]
    SingularOrbitPoint { phase: f64 },
    #[error("grid has too few points: {0}")]
    InsufficientGrid(String),
    #[error("c has zeros on the circle; the operator is singular")]
    SingularModel,
    #[error("phase is alpha-rational (witness n = {witness})")]
    AlphaRationalTheta { witness: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, printed by the command-line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::Terminated { .. } => "Terminated",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::InvalidCoupling(_) => "InvalidCoupling",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::SingularOrbitPoint { .. } => "SingularOrbitPoint",
            Error::InsufficientGrid(_) => "InsufficientGrid",
            Error::SingularModel => "SingularModel",
            Error::AlphaRationalTheta { .. } => "AlphaRationalTheta",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
