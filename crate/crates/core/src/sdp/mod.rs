//! Dense semidefinite programming over block-diagonal Hermitian PSD cones.
//!
//! Standard form:
//!
//! ```text
//! primal:  min Σ ⟨C_ℓ, X_ℓ⟩   s.t. Σ_ℓ ⟨A_{i,ℓ}, X_ℓ⟩ = b_i,  X_ℓ ⪰ 0
//! dual:    max bᵀy            s.t. C_ℓ − Σ_i y_i A_{i,ℓ} = Z_ℓ ⪰ 0
//! ```
//!
//! with `⟨A, X⟩ = Re Tr(A X)`. The solver is an infeasible-start primal–dual
//! path-following method (HKM direction, Mehrotra predictor–corrector) working
//! natively in complex Hermitian arithmetic.

mod problem;
mod solver;
mod verify;

use thiserror::Error;

use crate::linalg::ComplexMatrix;

pub use problem::{Constraint, SdpProblem, SparseHermitian};
pub use solver::{solve, MAX_CONSTRAINTS};
pub use verify::{verify_primal, verify_solution, PrimalReport, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("Schur complement is singular after redundancy elimination")]
    RankDeficient,
    #[error("{rows} constraints exceed the dense solver limit of {limit}")]
    TooLarge { rows: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    /// Iteration cap or stalled steps; the best iterate is returned.
    SlowProgress,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
    /// Emit one `log::debug!` line per iteration.
    pub log_iterations: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.98,
            log_iterations: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SdpError> {
        if !(self.gap_tol > 0.0) || !(self.feas_tol > 0.0) {
            return Err(SdpError::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(SdpError::InvalidConfig("step_fraction must lie in (0, 1)".into()));
        }
        if self.max_iterations == 0 {
            return Err(SdpError::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, Copy)]
pub struct IterationLog {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub mu: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub primal_blocks: Vec<ComplexMatrix>,
    pub dual_vector: Vec<f64>,
    pub dual_slack: Vec<ComplexMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal − dual| / (1 + |primal|)`.
    pub gap: f64,
    /// `max_i |⟨A_i, X⟩ − b_i|`.
    pub primal_residual: f64,
    /// `‖C − Z − Σ yᵢAᵢ‖_F / (1 + ‖C‖_F)`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub trace: Vec<IterationLog>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Relative duality gap as reported by the solver and the verifier.
pub fn relative_gap(primal: f64, dual: f64) -> f64 {
    (primal - dual).abs() / (1.0 + primal.abs())
}
