use thiserror::Error;

/// Errors raised by mesh construction, assembly, the eigensolvers and the
/// post-processing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WgError {
    #[error("mesh level {level} exceeds the supported maximum of {max}")]
    Capacity { level: u32, max: u32 },

    #[error("fine level {fine} is coarser than level {coarse}")]
    LevelOrder { coarse: u32, fine: u32 },

    #[error("degree {degree} is too low for the {problem} problem (minimum {minimum})")]
    DegreeTooLow {
        problem: &'static str,
        degree: usize,
        minimum: usize,
    },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
    },

    #[error("shifted system is nearly singular (residual {residual:.3e}, amplification {amplification:.3e})")]
    NearSingular { residual: f64, amplification: f64 },

    #[error("target {index}: shift {shift} collides with the fine spectrum (residual {residual:.3e}, amplification {amplification:.3e})")]
    NearSingularShift {
        index: usize,
        shift: f64,
        residual: f64,
        amplification: f64,
    },

    #[error("vector has no mass component")]
    ZeroMass,

    #[error("cluster contains no generators")]
    EmptyCluster,

    #[error("cluster has {computed} computed pairs but the exact eigenvalue has multiplicity {exact}")]
    MultiplicityMismatch { computed: usize, exact: usize },

    #[error("rate fit needs positive data: {0}")]
    NonPositive(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, WgError>;
