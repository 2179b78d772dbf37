// The solver on its own: smallest eigenvalue of a complex Hermitian matrix
// as min ⟨C, X⟩ over density matrices, with an independent re-check.

use std::error::Error;

use num_complex::Complex64;

use qns_capacity::linalg::{hermitian_eigenvalues, ComplexMatrix};
use qns_capacity::sdp::{solve, verify_solution, SdpProblem, SolverConfig, SparseHermitian};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let c = |re, im| Complex64::new(re, im);
    let cost = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.0)],
        vec![c(0.0, -2.0), c(-1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.5, 0.0), c(0.0, 0.0), c(3.0, 0.0)],
    ])?;
    let mut problem = SdpProblem::new(vec![3]);
    problem.set_objective(0, cost.clone())?;
    problem.add_constraint(vec![(0, SparseHermitian::from_dense(&ComplexMatrix::identity(3))?)], 1.0)?;

    let cfg = SolverConfig::default();
    let sol = solve(&problem, &cfg)?;
    let check = verify_solution(&problem, &sol, &cfg);
    let lambda_min = *hermitian_eigenvalues(&cost).last().ok_or("empty spectrum")?;
    println!(
        "{:?} after {} iterations: primal {:.12}, dual {:.12}, λ_min {lambda_min:.12}",
        sol.status, sol.iterations, sol.primal_objective, sol.dual_objective
    );
    println!(
        "re-check: gap {:.2e}, equality residual {:.2e}, min eigenvalue of X {:.2e}, certified {}",
        check.gap,
        check.primal.max_equality_residual,
        check.primal.min_eigenvalue(),
        check.certified
    );
    if !check.certified || (sol.primal_objective - lambda_min).abs() > 1e-7 {
        return Err("solver disagrees with the eigenvalue".into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
