//! Independent re-checks of a candidate solution, recomputed from the
//! problem data alone.

use super::{relative_gap, SdpProblem, SdpSolution, SolverConfig};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};

/// Lower bound on block eigenvalues for a primal point to count as PSD.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PrimalReport {
    /// `⟨A_i, X⟩ − b_i` for every original constraint.
    pub equality_residuals: Vec<f64>,
    pub max_equality_residual: f64,
    pub min_block_eigenvalues: Vec<f64>,
    pub objective: f64,
}

impl PrimalReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_block_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_feasible(&self, feas_tol: f64) -> bool {
        self.max_equality_residual <= feas_tol && self.min_eigenvalue() >= -PSD_TOL
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub primal: PrimalReport,
    pub dual_objective: f64,
    /// Smallest eigenvalue of `C − Σ yᵢAᵢ` over the blocks.
    pub dual_min_eigenvalue: f64,
    /// `‖C − Σ yᵢAᵢ − Z‖_F / (1 + ‖C‖_F)` against the returned slack.
    pub dual_residual: f64,
    pub gap: f64,
    pub certified: bool,
}

/// Feasibility and objective of a primal point.
pub fn verify_primal(problem: &SdpProblem, blocks: &[ComplexMatrix]) -> PrimalReport {
    let equality_residuals: Vec<f64> = problem
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, c)| problem.constraint_value(i, blocks) - c.rhs)
        .collect();
    let max_equality_residual = equality_residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let min_block_eigenvalues = blocks
        .iter()
        .map(|x| hermitian_eigenvalues(x).last().copied().unwrap_or(0.0))
        .collect();
    PrimalReport {
        equality_residuals,
        max_equality_residual,
        min_block_eigenvalues,
        objective: problem.objective_value(blocks),
    }
}

/// Recomputes residuals, eigenvalues, objectives and gap from the returned
/// data. Never fails; `certified` summarizes the checks against `cfg`.
pub fn verify_solution(problem: &SdpProblem, s: &SdpSolution, cfg: &SolverConfig) -> VerificationReport {
    let primal = verify_primal(problem, &s.primal_blocks);
    let dual_objective: f64 = problem
        .constraints()
        .iter()
        .zip(&s.dual_vector)
        .map(|(c, y)| c.rhs * y)
        .sum();
    let slack = problem.dual_slack(&s.dual_vector);
    let c_norm = problem
        .objective()
        .iter()
        .map(|c| c.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt();
    let dual_min_eigenvalue = slack
        .iter()
        .map(|z| hermitian_eigenvalues(z).last().copied().unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    let dual_residual = slack
        .iter()
        .zip(&s.dual_slack)
        .map(|(a, b)| (a - b).frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + c_norm);
    let gap = relative_gap(primal.objective, dual_objective);
    let certified = primal.is_feasible(cfg.feas_tol)
        && gap <= cfg.gap_tol
        && dual_residual <= cfg.feas_tol
        && dual_min_eigenvalue >= -cfg.feas_tol * (1.0 + c_norm);
    VerificationReport {
        primal,
        dual_objective,
        dual_min_eigenvalue,
        dual_residual,
        gap,
        certified,
    }
}
