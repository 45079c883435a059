use thiserror::Error;

/// Errors raised by depth computations and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DepthError {
    #[error("law unavailable for coordinate {0}")]
    LawUnavailable(usize),

    #[error("direction out of range: index {index} exceeds sample width {width}")]
    DirectionOutOfRange { index: usize, width: usize },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("heterogeneous model: {0}")]
    HeterogeneousModel(String),

    #[error("moment unavailable: {0}")]
    MomentUnavailable(String),

    #[error("no witness exists: {0}")]
    NoWitness(String),

    #[error("φ vanishes at x = {0}")]
    DensityVanishes(f64),

    #[error("quadrature did not converge: partial value {value}, error estimate {abs_error}")]
    Quadrature { value: f64, abs_error: f64 },

    #[error("symmetry required: {0}")]
    SymmetryRequired(String),

    #[error("grid is missing required points: {0:?}")]
    MissingGridPoints(Vec<f64>),

    #[error("subset budget exceeded: {subsets} subsets requested, budget is {budget}; use subsampling")]
    BudgetExceeded { subsets: u128, budget: u128 },

    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
}

pub type Result<T> = std::result::Result<T, DepthError>;
