//! Υ(N), the one-shot non-signalling assisted zero-error message count
//! `M₀ = ⌊Υ⌋`, closed forms for Pauli channels and qubit noncommutative
//! graphs, and finite-copy samples of the asymptotic rate.
//!
//! Capacities are in bits.

mod reduction;
mod report;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::channel::{choi, tensor_power, Channel, ChannelError};
use crate::linalg::{
    hermitian_eigenvalues, kron, partial_trace, ComplexMatrix, LinalgError, Subsystem, DEFAULT_RANK_TOL,
};
use crate::ncgraph::{noncommutative_graph_dim, GraphError};
use crate::sdp::{solve, verify_solution, SdpError, SolveStatus, SolverConfig, VerificationReport};

pub use reduction::{build_from_projection, build_sdp, ReducedSdp, PROJECTION_TOL};
pub use report::{full_report, CapacityReport, Discrepancy};

/// `|Υ − round(Υ)|` below which Υ is treated as an integer before flooring.
pub const INTEGER_SNAP_TOL: f64 = 1e-6;
/// Tolerance for re-checking the original constraints on `(S, U)`.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;
/// Largest `d_inⁿ · d_outⁿ` accepted for tensor powers.
pub const SIZE_CAP: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("input is not an orthogonal projection (‖P² − P‖_F = {deviation:.3e})")]
    NotProjection { deviation: f64 },
    #[error("projection is zero")]
    ZeroProjection,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("operation requires a qubit channel (d_in = {dim_in}, d_out = {dim_out})")]
    NotQubit { dim_in: usize, dim_out: usize },
    #[error("problem side {side} exceeds the cap of {cap}")]
    SizeCap { side: usize, cap: usize },
    #[error("solver reported {0:?}")]
    Solver(SolveStatus),
}

/// Re-check of `U ⪰ 0`, `S⊗I − U ⪰ 0`, `Tr_A U = I_B` and
/// `Tr P(S⊗I − U) = 0` on the reconstructed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionCheck {
    pub min_u_eigenvalue: f64,
    pub min_v_eigenvalue: f64,
    /// Max-entry error of `Tr_A U − I_B`.
    pub marginal_residual: f64,
    /// `|Tr P(S⊗I − U)|`.
    pub support_residual: f64,
    /// `|Tr S − value|`.
    pub trace_deviation: f64,
}

impl ReconstructionCheck {
    pub fn max_violation(&self) -> f64 {
        [
            -self.min_u_eigenvalue,
            -self.min_v_eigenvalue,
            self.marginal_residual,
            self.support_residual,
            self.trace_deviation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct UpsilonResult {
    pub value: f64,
    pub s_matrix: ComplexMatrix,
    pub u_matrix: ComplexMatrix,
    pub status: SolveStatus,
    /// Recomputed from the returned blocks and dual vector.
    pub certification: VerificationReport,
    pub reconstruction: ReconstructionCheck,
    pub projection_rank: usize,
    pub iterations: usize,
    /// Optimal, independently verified, and reconstruction within tolerance.
    pub certified: bool,
}

impl UpsilonResult {
    pub fn gap(&self) -> f64 {
        self.certification.gap
    }
}

/// Checks the original constraints on `(S, U)` against the projection.
pub fn check_point(
    p: &ComplexMatrix,
    s: &ComplexMatrix,
    u: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    value: f64,
) -> ReconstructionCheck {
    let v = &kron(s, &ComplexMatrix::identity(dim_b)) - u;
    let min = |m: &ComplexMatrix| hermitian_eigenvalues(m).last().copied().unwrap_or(0.0);
    let marginal = partial_trace(u, dim_a, dim_b, Subsystem::B).expect("u has side d_A·d_B");
    ReconstructionCheck {
        min_u_eigenvalue: min(u),
        min_v_eigenvalue: min(&v),
        marginal_residual: (&marginal - &ComplexMatrix::identity(dim_b)).max_abs(),
        support_residual: p.real_trace_product(&v).abs(),
        trace_deviation: (s.trace().re - value).abs(),
    }
}

/// Solves a reduced program and maps the result back to `(S, U)`.
pub fn solve_reduced(reduced: &ReducedSdp, cfg: &SolverConfig) -> Result<UpsilonResult, CapacityError> {
    let sol = solve(&reduced.problem, cfg)?;
    match sol.status {
        SolveStatus::Optimal | SolveStatus::SlowProgress => {}
        other => return Err(CapacityError::Solver(other)),
    }
    let certification = verify_solution(&reduced.problem, &sol, cfg);
    let value = -certification.primal.objective;
    let (s, u) = reduced.reconstruct(&sol.primal_blocks);
    let reconstruction = check_point(&reduced.projection, &s, &u, reduced.dim_a, reduced.dim_b, value);
    let certified =
        sol.status == SolveStatus::Optimal && certification.certified && reconstruction.passes(RECONSTRUCTION_TOL);
    Ok(UpsilonResult {
        value,
        s_matrix: s,
        u_matrix: u,
        status: sol.status,
        certification,
        reconstruction,
        projection_rank: reduced.projection_rank,
        iterations: sol.iterations,
        certified,
    })
}

/// Υ(N) by semidefinite programming.
pub fn upsilon(ch: &Channel, cfg: &SolverConfig) -> Result<UpsilonResult, CapacityError> {
    solve_reduced(&build_sdp(&choi(ch), DEFAULT_RANK_TOL)?, cfg)
}

/// Υ(P) for an arbitrary nonzero projection on `C^{d_a} ⊗ C^{d_b}`.
pub fn upsilon_of_projection(
    p: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    cfg: &SolverConfig,
) -> Result<UpsilonResult, CapacityError> {
    solve_reduced(&build_from_projection(p.clone(), dim_a, dim_b)?, cfg)
}

/// `⌊v⌋`, except that values within [`INTEGER_SNAP_TOL`] of an integer
/// round to it.
pub fn snap_floor(v: f64) -> u64 {
    let r = v.round();
    let snapped = if (v - r).abs() <= INTEGER_SNAP_TOL { r } else { v.floor() };
    snapped.max(0.0) as u64
}

/// `M₀^QNS` together with the Υ it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageCount {
    pub count: u64,
    pub upsilon: f64,
    pub certified: bool,
}

pub fn m0_qns(ch: &Channel, cfg: &SolverConfig) -> Result<MessageCount, CapacityError> {
    let r = upsilon(ch, cfg)?;
    Ok(MessageCount {
        count: snap_floor(r.value),
        upsilon: r.value,
        certified: r.certified,
    })
}

/// Υ of a generalized Pauli channel on `C^d` with `k` nonzero weights: `d²/k`.
pub fn pauli_upsilon_analytic(k: u32, d: u32) -> Result<Rational64, CapacityError> {
    let d2 = d.checked_mul(d).filter(|&v| v > 0);
    match d2 {
        Some(d2) if (1..=d2).contains(&k) => Ok(Rational64::new(i64::from(d2), i64::from(k))),
        _ => Err(CapacityError::OutOfRange(format!("k = {k} for d = {d}"))),
    }
}

/// `log₂(d²/k)` bits.
pub fn c0_qns_pauli(k: u32, d: u32) -> Result<f64, CapacityError> {
    pauli_upsilon_analytic(k, d)?;
    Ok((f64::from(d * d) / f64::from(k)).log2())
}

/// `4 / dim S` for a qubit channel.
pub fn m0_qns_via_graph(ch: &Channel) -> Result<Rational64, CapacityError> {
    if !ch.is_qubit() {
        return Err(CapacityError::NotQubit {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
        });
    }
    let dim = noncommutative_graph_dim(ch, DEFAULT_RANK_TOL)?;
    Ok(Rational64::new(4, dim as i64))
}

/// One sample `(1/n) log₂ Υ(N^{⊗n})`.
#[derive(Debug, Clone)]
pub struct FiniteCopySample {
    pub n: usize,
    pub bits: f64,
    pub upsilon: UpsilonResult,
}

pub fn c0_qns_finite_n(ch: &Channel, n: usize, cfg: &SolverConfig) -> Result<FiniteCopySample, CapacityError> {
    if n == 0 {
        return Err(CapacityError::OutOfRange("n must be at least 1".into()));
    }
    let side = tensor_side(ch, n);
    if side > SIZE_CAP {
        return Err(CapacityError::SizeCap { side, cap: SIZE_CAP });
    }
    let r = upsilon(&tensor_power(ch, n), cfg)?;
    Ok(FiniteCopySample {
        n,
        bits: r.value.log2() / n as f64,
        upsilon: r,
    })
}

/// `(d_in·d_out)ⁿ`, saturating.
fn tensor_side(ch: &Channel, n: usize) -> usize {
    let base = ch.dim_in() * ch.dim_out();
    (0..n).fold(1usize, |acc, _| acc.saturating_mul(base))
}

/// Projection onto `span{(I ⊗ XⁱZʲ)|Φ⟩}` over the given index pairs, with
/// `|Φ⟩ = Σ|kk⟩`.
pub fn maximally_entangled_projection(d: usize, pairs: &[(usize, usize)]) -> ComplexMatrix {
    let n = d * d;
    let mut p = ComplexMatrix::zeros(n, n);
    let norm = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for &(i, j) in pairs {
        let w = crate::channel::weyl(d, i, j);
        let v: Vec<Complex64> = (0..n).map(|idx| w[(idx % d, idx / d)] * norm).collect();
        p += &ComplexMatrix::outer(&v, &v);
    }
    p.hermitian_part()
}

/// The analytic point `S = (d/k) I`, `U = (d/k) P` for a projection `P` onto
/// `k` orthogonal maximally entangled vectors; its objective is `d²/k`.
pub fn maximally_entangled_certificate(p: &ComplexMatrix, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let k = p.trace().re.round();
    let c = d as f64 / k;
    (ComplexMatrix::identity(d).scale(c), p.scale(c))
}

#[cfg(test)]
mod tests;
