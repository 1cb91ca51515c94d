use thiserror::Error;

/// Errors surfaced by samplers, targets and objectives.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite log-density at state {state}")]
    NonFiniteLogDensity { state: String },

    /// The realized accept/reject branch had probability zero. Cannot happen
    /// under correct sampling; indicates an internal bug or API misuse.
    #[error("realized branch has probability zero (alpha = {alpha}, accepted = {accepted})")]
    ImpossibleBranch { alpha: f64, accepted: bool },

    #[error("coupled proposal violated stickiness: x == y but x' != y'")]
    StickinessViolation,

    #[error("distribution is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("transition matrix row {row} sums to {sum}, expected 1")]
    NotRowStochastic { row: usize, sum: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("lattice side {0} too large for exhaustive enumeration (need 2^(L*L) <= 65536)")]
    LatticeTooLarge(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
