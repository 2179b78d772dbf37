//! Kraus operator space `K = span{Eᵢ}`, the noncommutative graph
//! `S = span{Eᵢ†Eⱼ}`, and the qubit entanglement-assisted lookup table.

use thiserror::Error;

use crate::channel::Channel;
use crate::linalg::{orthonormalize, unvectorize, vectorize, ComplexMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("generating set is empty or identically zero")]
    ZeroSpan,
    #[error("operators have inconsistent shapes")]
    ShapeMismatch,
    #[error("channel is not square (d_in = {dim_in}, d_out = {dim_out})")]
    NotSquare { dim_in: usize, dim_out: usize },
    #[error("noncommutative graph dimension {0} outside 1..=4")]
    DimensionOutOfRange(usize),
}

/// Hilbert–Schmidt orthonormal basis of an operator space.
#[derive(Debug, Clone)]
pub struct OperatorSpaceBasis {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl OperatorSpaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection of `m` onto the span.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for g in &self.basis {
            out += &g.scale_complex(g.hs_inner(m));
        }
        out
    }
}

/// Orthonormal basis of `span(ops)` by Gram–Schmidt on the vectorized operators.
pub fn operator_space_basis(ops: &[ComplexMatrix], rel_tol: f64) -> Result<OperatorSpaceBasis, GraphError> {
    let first = ops.first().ok_or(GraphError::ZeroSpan)?;
    let (rows, cols) = (first.rows(), first.cols());
    if ops.iter().any(|m| m.rows() != rows || m.cols() != cols) {
        return Err(GraphError::ShapeMismatch);
    }
    let vectors: Vec<_> = ops.iter().map(|m| vectorize(m).as_slice().to_vec()).collect();
    let basis: Vec<ComplexMatrix> = orthonormalize(&vectors, rel_tol)
        .into_iter()
        .map(|v| unvectorize(&v, rows, cols).expect("length preserved"))
        .collect();
    if basis.is_empty() {
        return Err(GraphError::ZeroSpan);
    }
    Ok(OperatorSpaceBasis { rows, cols, basis })
}

/// Orthonormal basis of `S = span{Gⱼ†Gₖ}` over an orthonormal basis `{Gⱼ}` of `K`.
pub fn noncommutative_graph(ch: &Channel, rel_tol: f64) -> Result<OperatorSpaceBasis, GraphError> {
    if ch.dim_in() != ch.dim_out() {
        return Err(GraphError::NotSquare {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
        });
    }
    let k = operator_space_basis(ch.kraus(), rel_tol)?;
    let products: Vec<ComplexMatrix> = k
        .basis
        .iter()
        .flat_map(|gj| k.basis.iter().map(move |gk| gj.adjoint().matmul(gk)))
        .collect();
    operator_space_basis(&products, rel_tol)
}

pub fn noncommutative_graph_dim(ch: &Channel, rel_tol: f64) -> Result<usize, GraphError> {
    Ok(noncommutative_graph(ch, rel_tol)?.dim())
}

/// One-shot entanglement-assisted zero-error message count of a qubit
/// noncommutative graph of the given dimension.
pub fn mse_qubit(dim_s: usize) -> Result<u32, GraphError> {
    match dim_s {
        1 => Ok(4),
        2 | 3 => Ok(2),
        4 => Ok(1),
        other => Err(GraphError::DimensionOutOfRange(other)),
    }
}

/// `log₂ M₀^SE(S)` in bits.
pub fn cse_qubit(dim_s: usize) -> Result<f64, GraphError> {
    Ok(f64::from(mse_qubit(dim_s)?).log2())
}
