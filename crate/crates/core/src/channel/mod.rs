//! Quantum channels in Kraus form, their Choi matrices, and the channel
//! families used throughout the crate.
//!
//! Choi convention: `J = Σᵢ (I ⊗ Eᵢ)|Φ⟩⟨Φ|(I ⊗ Eᵢ)†` with the unnormalized
//! `|Φ⟩ = Σₖ |k⟩|k⟩`, reference system `A` first and output `B` second. Hence
//! `Tr_B J = I_A` and `Tr J = d_A`.

pub mod random;
mod spec;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    self, hermitian_eig, kron, partial_trace, permute_subsystems, ComplexMatrix, LinalgError,
    Subsystem, ONE, ZERO,
};

pub use spec::{parse_channel_spec, realize, ChannelSpec, SpecError};

/// Tolerance on `‖Σ E†E − I‖_F` for a Kraus list to count as trace preserving.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-9;

/// Probabilities below this are treated as exactly zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Tolerance on the sum of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("empty Kraus list")]
    Empty,
    #[error("Kraus operator {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("not trace preserving: ‖Σ E†E − I‖_F = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },
    #[error("channel is not square (d_in = {dim_in}, d_out = {dim_out})")]
    NotSquare { dim_in: usize, dim_out: usize },
    #[error("invalid probability distribution: {0}")]
    InvalidProbabilities(String),
    #[error("invalid Choi matrix: {0}")]
    InvalidChoi(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A completely positive trace-preserving map `L(C^{d_in}) → L(C^{d_out})`.
#[derive(Debug, Clone)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Choi matrix of a channel, side `dim_in · dim_out`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
}

impl Channel {
    /// Validates shapes and trace preservation. Kraus operators with zero
    /// Frobenius norm (below 1e-12) are dropped.
    pub fn from_kraus(ops: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = ops.first().ok_or(ChannelError::Empty)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for (index, op) in ops.iter().enumerate() {
            if op.rows() != dim_out || op.cols() != dim_in {
                return Err(ChannelError::ShapeMismatch {
                    index,
                    rows: op.rows(),
                    cols: op.cols(),
                    expected_rows: dim_out,
                    expected_cols: dim_in,
                });
            }
        }
        let kraus: Vec<ComplexMatrix> = ops
            .into_iter()
            .filter(|op| op.frobenius_norm() > 1e-12)
            .collect();
        if kraus.is_empty() {
            return Err(ChannelError::Empty);
        }
        let channel = Self {
            dim_in,
            dim_out,
            kraus,
        };
        let deviation = channel.trace_preservation_deviation();
        if deviation > TRACE_PRESERVATION_TOL {
            return Err(ChannelError::NotTracePreserving { deviation });
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// Conjugation by a unitary. Trace preservation is still checked.
    pub fn unitary(u: ComplexMatrix) -> Result<Self, ChannelError> {
        Self::from_kraus(vec![u])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_qubit(&self) -> bool {
        self.dim_in == 2 && self.dim_out == 2
    }

    /// `‖Σᵢ Eᵢ†Eᵢ − I‖_F`.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for e in &self.kraus {
            sum += &e.adjoint().matmul(e);
        }
        (&sum - &ComplexMatrix::identity(self.dim_in)).frobenius_norm()
    }

    /// `N(ρ) = Σᵢ Eᵢ ρ Eᵢ†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for e in &self.kraus {
            out += &e.matmul(rho).matmul_adjoint(e);
        }
        out
    }

    /// `U ∘ N ∘ V`: Kraus operators `U Eᵢ V`.
    pub fn conjugated(&self, before: &ComplexMatrix, after: &ComplexMatrix) -> Result<Self, ChannelError> {
        Self::from_kraus(self.kraus.iter().map(|e| after.matmul(&e.matmul(before))).collect())
    }
}

impl ChoiMatrix {
    /// Wraps a matrix after checking the Choi invariants: Hermitian PSD,
    /// `Tr_B J = I_A` within 1e-9.
    pub fn new(matrix: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self, ChannelError> {
        let n = dim_in * dim_out;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(ChannelError::InvalidChoi(format!(
                "{}x{} matrix for d_in = {dim_in}, d_out = {dim_out}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let matrix = matrix.to_hermitian()?;
        let norm = matrix.frobenius_norm();
        let min_eig = linalg::hermitian_eigenvalues(&matrix)
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -1e-9 * norm.max(1.0) {
            return Err(ChannelError::InvalidChoi(format!(
                "not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        let marginal = partial_trace(&matrix, dim_in, dim_out, Subsystem::A)?;
        let dev = (&marginal - &ComplexMatrix::identity(dim_in)).frobenius_norm();
        if dev > 1e-9 {
            return Err(ChannelError::InvalidChoi(format!(
                "Tr_B J deviates from I_A by {dev:.3e}"
            )));
        }
        Ok(Self {
            matrix,
            dim_in,
            dim_out,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        linalg::rank_with_tol(&self.matrix, rel_tol)
    }

    /// `Tr_A J`, which equals `I_B` exactly when the channel is unital.
    pub fn output_marginal(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dim_in, self.dim_out, Subsystem::B)
            .expect("Choi dimensions validated at construction")
    }
}

/// Column `(I ⊗ E)|Φ⟩`, whose entry at `k·d_out + b` is `E[b, k]`.
fn choi_vector(e: &ComplexMatrix) -> Vec<Complex64> {
    let (dim_out, dim_in) = (e.rows(), e.cols());
    let mut v = vec![ZERO; dim_in * dim_out];
    for k in 0..dim_in {
        for b in 0..dim_out {
            v[k * dim_out + b] = e[(b, k)];
        }
    }
    v
}

pub fn choi(ch: &Channel) -> ChoiMatrix {
    let n = ch.dim_in * ch.dim_out;
    let mut j = ComplexMatrix::zeros(n, n);
    for e in &ch.kraus {
        let v = choi_vector(e);
        j += &ComplexMatrix::outer(&v, &v);
    }
    ChoiMatrix {
        matrix: j,
        dim_in: ch.dim_in,
        dim_out: ch.dim_out,
    }
}

/// Kraus operators from the eigenvectors of `J` scaled by `√λ`, keeping
/// eigenvalues above `rel_tol · λ_max`.
pub fn kraus_from_choi(j: &ChoiMatrix, rel_tol: f64) -> Result<Channel, ChannelError> {
    let checked = ChoiMatrix::new(j.matrix.clone(), j.dim_in, j.dim_out)?;
    let eig = hermitian_eig(&checked.matrix)?;
    let cutoff = rel_tol * eig.max_eigenvalue().max(1e-300);
    let mut ops = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            break;
        }
        let v = eig.eigenvector(k);
        let mut e = ComplexMatrix::zeros(j.dim_out, j.dim_in);
        for a in 0..j.dim_in {
            for b in 0..j.dim_out {
                e[(b, a)] = v[a * j.dim_out + b] * lambda.sqrt();
            }
        }
        ops.push(e);
    }
    Channel::from_kraus(ops)
}

/// `‖Σᵢ EᵢEᵢ† − I‖_F ≤ tol`.
pub fn is_unital(ch: &Channel, tol: f64) -> Result<bool, ChannelError> {
    Ok(unitality_deviation(ch)? <= tol)
}

/// `‖Σᵢ EᵢEᵢ† − I‖_F`.
pub fn unitality_deviation(ch: &Channel) -> Result<f64, ChannelError> {
    if ch.dim_in != ch.dim_out {
        return Err(ChannelError::NotSquare {
            dim_in: ch.dim_in,
            dim_out: ch.dim_out,
        });
    }
    let mut sum = ComplexMatrix::zeros(ch.dim_out, ch.dim_out);
    for e in &ch.kraus {
        sum += &e.matmul_adjoint(e);
    }
    Ok((&sum - &ComplexMatrix::identity(ch.dim_out)).frobenius_norm())
}

/// Generalized shift `X = Σ |j⊕1⟩⟨j|` on `C^d`.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = ONE;
    }
    x
}

/// Generalized clock `Z = Σ ωʲ|j⟩⟨j|`, `ω = exp(2πi/d)`.
pub fn clock(d: usize) -> ComplexMatrix {
    let mut z = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let angle = 2.0 * std::f64::consts::PI * (j as f64) / (d as f64);
        z[(j, j)] = Complex64::from_polar(1.0, angle);
    }
    // Exact signs for d = 2 keep the qubit Paulis real.
    if d == 2 {
        z[(1, 1)] = Complex64::new(-1.0, 0.0);
    }
    z
}

/// `XⁱZʲ` on `C^d`.
pub fn weyl(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut x_pow = ComplexMatrix::identity(d);
    let x = shift(d);
    for _ in 0..i {
        x_pow = x_pow.matmul(&x);
    }
    let mut z_pow = ComplexMatrix::identity(d);
    let z = clock(d);
    for _ in 0..j {
        z_pow = z_pow.matmul(&z);
    }
    x_pow.matmul(&z_pow)
}

fn check_simplex(probs: &[f64]) -> Result<(), ChannelError> {
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(ChannelError::InvalidProbabilities(format!("entry {p} is negative or not finite")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(ChannelError::InvalidProbabilities(format!("entries sum to {total}, not 1")));
    }
    Ok(())
}

/// Qubit Pauli channel `Σ p_ij XⁱZʲ ρ (XⁱZʲ)†` with `probs = [p00, p01, p10, p11]`.
pub fn pauli_channel(probs: [f64; 4]) -> Result<Channel, ChannelError> {
    generalized_pauli_channel(2, &probs)
}

/// Weyl-covariant channel on `C^d`; `probs` holds `p_ij` at index `i·d + j`.
pub fn generalized_pauli_channel(d: usize, probs: &[f64]) -> Result<Channel, ChannelError> {
    if d < 2 {
        return Err(ChannelError::InvalidProbabilities(format!("dimension {d} < 2")));
    }
    if probs.len() != d * d {
        return Err(ChannelError::InvalidProbabilities(format!(
            "{} probabilities for d = {d}, expected {}",
            probs.len(),
            d * d
        )));
    }
    check_simplex(probs)?;
    let kraus = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| probs[i * d + j] >= ZERO_PROBABILITY)
        .map(|(i, j)| weyl(d, i, j).scale(probs[i * d + j].sqrt()))
        .collect();
    Channel::from_kraus(kraus)
}

/// Number of probabilities counted as nonzero.
pub fn support_size(probs: &[f64]) -> usize {
    probs.iter().filter(|&&p| p >= ZERO_PROBABILITY).count()
}

/// Extremal qubit channel with `E₁ = cosθ|0⟩⟨0| + cosφ|1⟩⟨1|` and
/// `E₂ = sinφ|0⟩⟨1| + sinθ|1⟩⟨0|`. Nonunital iff `cos²θ ≠ cos²φ`.
pub fn extremal_channel(theta: f64, phi: f64) -> Channel {
    let e1 = ComplexMatrix::from_real(2, 2, &[theta.cos(), 0.0, 0.0, phi.cos()]);
    let e2 = ComplexMatrix::from_real(2, 2, &[0.0, phi.sin(), theta.sin(), 0.0]);
    Channel::from_kraus(vec![e1, e2]).expect("extremal channel is trace preserving for all angles")
}

/// Amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<Channel, ChannelError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ChannelError::InvalidProbabilities(format!("gamma = {gamma}")));
    }
    let e0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
    let e1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
    Channel::from_kraus(vec![e0, e1])
}

/// `a ⊗ b` with Kraus set `{Eᵢ ⊗ Fⱼ}` acting on `A₁A₂ → B₁B₂`.
pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|e| b.kraus.iter().map(move |f| kron(e, f)))
        .collect();
    Channel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus,
    }
}

/// `ch^{⊗n}` for `n ≥ 1`.
pub fn tensor_power(ch: &Channel, n: usize) -> Channel {
    assert!(n >= 1, "tensor_power needs n >= 1");
    let mut out = ch.clone();
    for _ in 1..n {
        out = tensor(&out, ch);
    }
    out
}

/// Choi matrix of `a ⊗ b` from the two Choi matrices: `kron` orders the
/// factors `A₁B₁A₂B₂`, which is permuted to `A₁A₂B₁B₂`.
pub fn choi_of_tensor(ja: &ChoiMatrix, jb: &ChoiMatrix) -> ChoiMatrix {
    let k = kron(&ja.matrix, &jb.matrix);
    let dims = [ja.dim_in, ja.dim_out, jb.dim_in, jb.dim_out];
    let matrix = permute_subsystems(&k, &dims, &[0, 2, 1, 3]).expect("dims match by construction");
    ChoiMatrix {
        matrix,
        dim_in: ja.dim_in * jb.dim_in,
        dim_out: ja.dim_out * jb.dim_out,
    }
}

/// Orthonormal basis (as columns) of the eigenspace of `J` above the cutoff.
pub fn support_basis(j: &ChoiMatrix, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let eig = hermitian_eig(j.matrix()).expect("Choi matrices are Hermitian by construction");
    let cutoff = rel_tol * eig.max_eigenvalue().max(1e-300);
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cutoff)
        .map(|(k, _)| eig.eigenvector(k))
        .collect()
}

/// Projection onto the support of the Choi matrix.
pub fn support_projection(j: &ChoiMatrix, rel_tol: f64) -> ComplexMatrix {
    let n = j.matrix.rows();
    let mut p = ComplexMatrix::zeros(n, n);
    for v in support_basis(j, rel_tol) {
        p += &ComplexMatrix::outer(&v, &v);
    }
    p.hermitian_part()
}
