use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a game needs at least one pure strategy")]
    EmptyGame,

    #[error("payoff ({row}, {col}) = {value} lies outside [0, 1]")]
    PayoffOutOfRange { row: usize, col: usize, value: f64 },

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("not a point of the simplex: {0}")]
    NotOnSimplex(String),

    #[error("strategy is not interior: mass {mass} at index {index}")]
    NotInterior { index: usize, mass: f64 },

    #[error("learning rate must be positive and finite, got {0}")]
    InvalidRate(f64),

    #[error("support of P is not contained in support of Q (index {0})")]
    SupportViolation(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("game has {n} strategies, support enumeration is limited to {max}")]
    TooLarge { n: usize, max: usize },

    #[error("alpha grid needs at least 3 points, got {0}")]
    GridTooShort(usize),

    #[error("check requires a trajectory started from the uniform distribution")]
    NonUniformStart,

    #[error("schedule invariant broken: {0}")]
    ScheduleInvariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
