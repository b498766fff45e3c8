use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("horizon must be at least 1")]
    NonPositiveHorizon,
    #[error("instance has no states")]
    EmptyStateSet,
    #[error("instance has no actions")]
    EmptyActionSet,
    #[error("transition ({t}, {s}, {a}) names state {next}, but only {num_states} states exist")]
    DanglingStateIndex {
        t: usize,
        s: usize,
        a: usize,
        next: usize,
        num_states: usize,
    },
    #[error("initial state {0} is out of range")]
    InitialStateOutOfRange(usize),
    #[error("layer violation: {0}")]
    LayerViolation(String),
    #[error("transition table shape mismatch: {0}")]
    TransitionShape(String),
    #[error("reward {reward} exceeds declared bound {bound}")]
    RewardAboveBound { reward: i64, bound: i64 },
    #[error("malformed instance file: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rho override must be at least 1, got {0}")]
    OverrideTooSmall(i64),
    #[error("horizon {horizon} is too short for tree depth {depth} (need at least {needed})")]
    HorizonTooShort {
        horizon: usize,
        depth: usize,
        needed: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ell = {ell} is below the required minimum {min}")]
    EllTooSmall { ell: f64, min: f64 },
    #[error("epsilon = {0} outside (0, 1/2]")]
    EpsilonOutOfRange(f64),
    #[error("cost entry {index} = {value} outside [-1, 1]")]
    CostOutOfRange { index: usize, value: f64 },
    #[error("residual {value} at constraint {index} exceeds width {ell}")]
    ResidualExceedsEll { index: usize, value: f64, ell: f64 },

    #[error("negative weight {value} at constraint {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("solution is off the simplex: sum r*lambda = {got}, expected {sigma}")]
    NotOnSimplex { got: f64, sigma: f64 },
    #[error("sigma = {sigma} outside [1, {rho}]")]
    SigmaOutOfRange { sigma: u64, rho: u64 },

    #[error("no sigma in [1, {rho}] was found feasible")]
    AllInfeasible { rho: u64 },
    #[error("largest lambda at the initial state is {best}, below threshold {threshold}")]
    ExtractionBelowThreshold { best: f64, threshold: f64 },
    #[error("action extraction failed after {escalations} delta escalations")]
    ExtractionFailed { escalations: usize },

    #[error("graph has {0} vertices; at least 3 are required")]
    GraphTooSmall(usize),
    #[error("trace is not a Hamiltonian cycle: {0}")]
    NotHamiltonian(String),
    #[error("trace does not match the set-cover encoding: {0}")]
    TraceMismatch(String),
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
