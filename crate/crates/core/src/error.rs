use thiserror::Error;

/// Errors raised by the engine. Every variant knows which subsystem raised
/// it so that the CLI can print a module-tagged message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: infeasible regime: {0}")]
    InfeasibleRegime(String),

    #[error("geometry: degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("{module}: numerically singular system (condition estimate {condition:.3e}): {detail}")]
    Singular {
        module: &'static str,
        condition: f64,
        detail: String,
    },

    #[error("physics: non-positive resonance: {0}")]
    NonPositiveResonance(String),

    #[error("physics: frequency sits on the Minnaert resonance (denominator {denominator:.3e})")]
    AtResonance { denominator: f64 },

    #[error("physics: degenerate division: {0}")]
    DivisionDegenerate(String),

    #[error("physics: unreachable frequency: {0}")]
    UnreachableFrequency(String),

    #[error("foldy_lax: coincident points in fundamental solution")]
    CoincidentPoints,

    #[error("fields: evaluation point inside the exclusion zone of bubble {bubble}")]
    PointInsideExclusionZone { bubble: usize },

    #[error("foldy_lax: scattering coefficients have mixed signs ({positive} positive, {negative} negative)")]
    MixedSignCoefficients { positive: usize, negative: usize },

    #[error("oracle: truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("oracle: resolution insufficient: {0}")]
    ResolutionInsufficient(String),

    #[error("harness: oracle infeasible: {0}")]
    OracleInfeasible(String),

    #[error("{module}: invalid input: {detail}")]
    InvalidInput {
        module: &'static str,
        detail: String,
    },

    #[error("harness: config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(module: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidInput {
            module,
            detail: detail.into(),
        }
    }

    pub(crate) fn singular(module: &'static str, condition: f64, detail: impl Into<String>) -> Self {
        Error::Singular {
            module,
            condition,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the `bubbles` CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleRegime(_) => 2,
            Error::Singular { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
