use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationFailureKind {
    MaxStepsExceeded,
    StepUnderflow,
}

impl std::fmt::Display for IntegrationFailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MaxStepsExceeded => write!(f, "max_steps exceeded"),
            Self::StepUnderflow => write!(f, "step size underflow (stiffness)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inadmissible Cauchy data: inclusion residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    InadmissibleData { residual: f64, tolerance: f64 },

    #[error("integration failed at t = {t:.6e}: {kind}")]
    IntegrationFailure {
        kind: IntegrationFailureKind,
        t: f64,
        /// Trajectory computed up to the failure time.
        partial: Box<crate::flow::Trajectory>,
    },

    #[error("inconsistent lower bound: objective at initial point {value:.6e} is below the certified infimum {bound:.6e}")]
    InconsistentBound { value: f64, bound: f64 },

    #[error("mollified trajectories did not converge within {levels} levels (last gap {last_gap:.3e}, target {target:.3e})")]
    NonConvergence {
        levels: usize,
        last_gap: f64,
        target: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FlowError>;
