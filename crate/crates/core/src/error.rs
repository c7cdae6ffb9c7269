use alloc::boxed::Box;
use alloc::string::String;

use crate::levelset::LevelSetNetwork;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("corrupt network: {0}")]
    CorruptNetwork(String),
    #[error("degenerate gradient (|∇φ| = {norm:e})")]
    DegenerateGradient { norm: f64 },
    #[error("empty sample set")]
    EmptySamples,
    #[error("training diverged at step {step}")]
    TrainingDiverged {
        step: usize,
        /// Parameters from the last step with a finite loss.
        last_finite: Box<LevelSetNetwork>,
    },
    #[error("shape vanished (acceptance rate {acceptance:e} after {trials} trials)")]
    ShapeVanished { acceptance: f64, trials: usize },
    #[error("projection failed after {steps} steps (|φ| = {residual:e})")]
    ProjectionFailed { steps: usize, residual: f64 },
    #[error("boundary too small for {requested} points ({projected} projected)")]
    BoundaryTooSmall { requested: usize, projected: usize },
    #[error("isolated vertex {0}")]
    IsolatedVertex(usize),
    #[error("eigensolver did not converge: {converged} of {requested} pairs, worst residual {residual:e}")]
    EigenNoConvergence {
        requested: usize,
        converged: usize,
        residual: f64,
    },
    #[error("linear solve failed: relative residual {residual:e} after {iterations} iterations")]
    SolveFailed { residual: f64, iterations: usize },
    #[error("eigenvalue cluster exceeds the {computed} computed pairs; increase K")]
    IncreaseK { computed: usize },
    #[error("non-convex architecture")]
    NonConvexArchitecture,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
