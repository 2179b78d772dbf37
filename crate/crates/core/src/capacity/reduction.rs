//! Standard form of the Υ program.
//!
//! With `V = S⊗I_B − U` the program reads
//!
//! ```text
//! max Tr S   s.t.  U ⪰ 0,  V ⪰ 0,  Tr_A U = I_B,  Tr P V = 0.
//! ```
//!
//! `V ⪰ 0` and `Tr P V = 0` force `supp V ⟂ supp P`, so `V = Q W Q†` with `Q`
//! an isometry onto the complement of `supp P`. `S` is eliminated by
//! requiring `U + Q W Q†` to be orthogonal to every Hermitian `Y` with
//! `Tr_B Y = 0`, which is exactly membership in `{H ⊗ I_B}`. Blocks are
//! `[U, W]`; the `W` block is absent when `P` has full rank.

use num_complex::Complex64;

use super::CapacityError;
use crate::linalg::{hermitian_eig, kron, partial_trace, rank_with_tol, ComplexMatrix, Subsystem};
use crate::sdp::{SdpProblem, SparseHermitian};

/// Idempotency tolerance for projections passed in directly.
pub const PROJECTION_TOL: f64 = 1e-9;

/// The built problem together with what is needed to map solver blocks
/// back to `(S, U)`.
#[derive(Debug, Clone)]
pub struct ReducedSdp {
    pub problem: SdpProblem,
    pub projection: ComplexMatrix,
    /// Columns span the orthogonal complement of `supp P`; `n × (n − r)`.
    pub complement: ComplexMatrix,
    pub projection_rank: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Number of rows imposing `U + QWQ† ∈ {H ⊗ I_B}`.
    pub subspace_constraints: usize,
    /// Number of rows imposing `Tr_A U = I_B`.
    pub marginal_constraints: usize,
}

impl ReducedSdp {
    pub fn side(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn has_w_block(&self) -> bool {
        self.projection_rank < self.side()
    }

    /// `Q W Q†` from the `W` block; zero when there is no such block.
    pub fn lift_w(&self, blocks: &[ComplexMatrix]) -> ComplexMatrix {
        match blocks.get(1) {
            Some(w) if self.has_w_block() => self.complement.matmul(w).matmul_adjoint(&self.complement),
            _ => ComplexMatrix::zeros(self.side(), self.side()),
        }
    }

    /// `S = Tr_B(U + QWQ†) / d_B` and `U` from solver blocks.
    pub fn reconstruct(&self, blocks: &[ComplexMatrix]) -> (ComplexMatrix, ComplexMatrix) {
        let u = blocks[0].clone();
        let total = &u + &self.lift_w(blocks);
        let s = partial_trace(&total, self.dim_a, self.dim_b, Subsystem::A)
            .expect("block side is d_A·d_B")
            .scale(1.0 / self.dim_b as f64)
            .hermitian_part();
        (s, u)
    }

    /// Solver blocks for a point `(S, U)` of the original program:
    /// `W = Q†(S⊗I − U)Q`.
    pub fn embed(&self, s: &ComplexMatrix, u: &ComplexMatrix) -> Vec<ComplexMatrix> {
        let mut blocks = vec![u.clone()];
        if self.has_w_block() {
            let v = &kron(s, &ComplexMatrix::identity(self.dim_b)) - u;
            blocks.push(v.congruence_adjoint(&self.complement).hermitian_part());
        }
        blocks
    }
}

/// Reduced program for a Choi matrix; the projection is onto the eigenspace
/// of `J` above `rel_tol·λ_max`.
pub fn build_sdp(j: &crate::channel::ChoiMatrix, rel_tol: f64) -> Result<ReducedSdp, CapacityError> {
    let p = crate::channel::support_projection(j, rel_tol);
    build_from_projection(p, j.dim_in(), j.dim_out())
}

/// Reduced program for an arbitrary nonzero orthogonal projection on
/// `C^{d_a} ⊗ C^{d_b}`.
pub fn build_from_projection(p: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ReducedSdp, CapacityError> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || p.rows() != n || p.cols() != n {
        return Err(CapacityError::Shape(format!(
            "projection is {}x{}, expected {n}x{n}",
            p.rows(),
            p.cols()
        )));
    }
    let p = p.to_hermitian()?;
    let deviation = (&p.matmul(&p) - &p).frobenius_norm();
    if deviation > PROJECTION_TOL * p.frobenius_norm().max(1.0) {
        return Err(CapacityError::NotProjection { deviation });
    }
    let rank = rank_with_tol(&p, 0.5);
    if rank == 0 {
        return Err(CapacityError::ZeroProjection);
    }

    let eig = hermitian_eig(&p)?;
    // Eigenvalues are sorted descending: the last n − r span the complement.
    let mut complement = ComplexMatrix::zeros(n, n - rank);
    for (c, k) in (rank..n).enumerate() {
        complement.set_col(c, &eig.eigenvector(k));
    }

    let has_w = rank < n;
    let mut problem = SdpProblem::new(if has_w { vec![n, n - rank] } else { vec![n] });
    let scale = -1.0 / dim_b as f64;
    problem.set_objective(0, ComplexMatrix::identity(n).scale(scale))?;
    if has_w {
        problem.set_objective(1, ComplexMatrix::identity(n - rank).scale(scale))?;
    }

    let mut subspace_constraints = 0;
    for y in trace_b_free_basis(dim_a, dim_b) {
        let mut terms = Vec::with_capacity(2);
        if has_w {
            let qyq = y.to_dense().congruence_adjoint(&complement).hermitian_part();
            terms.push((1, SparseHermitian::from_dense(&qyq)?));
        }
        terms.insert(0, (0, y));
        problem.add_constraint(terms, 0.0)?;
        subspace_constraints += 1;
    }

    let mut marginal_constraints = 0;
    for (f, rhs) in hermitian_basis(dim_b) {
        let mut a = SparseHermitian::zeros(n);
        for x in 0..dim_a {
            for &(b, b2, v) in f.entries() {
                if b <= b2 {
                    a.add_symmetric(x * dim_b + b, x * dim_b + b2, v);
                }
            }
        }
        problem.add_constraint(vec![(0, a)], rhs)?;
        marginal_constraints += 1;
    }

    Ok(ReducedSdp {
        problem,
        projection: p,
        complement,
        projection_rank: rank,
        dim_a,
        dim_b,
        subspace_constraints,
        marginal_constraints,
    })
}

/// Hermitian basis of `d × d` matrices with the trace of each element:
/// `E_aa`, `E_ab + E_ba`, `i(E_ab − E_ba)` for `a < b`.
fn hermitian_basis(d: usize) -> Vec<(SparseHermitian, f64)> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in a..d {
            let mut re = SparseHermitian::zeros(d);
            re.add_symmetric(a, b, Complex64::new(1.0, 0.0));
            out.push((re, if a == b { 1.0 } else { 0.0 }));
            if a != b {
                let mut im = SparseHermitian::zeros(d);
                im.add_symmetric(a, b, Complex64::new(0.0, 1.0));
                out.push((im, 0.0));
            }
        }
    }
    out
}

/// Basis of the Hermitian operators `Y` on `A ⊗ B` with `Tr_B Y = 0`, the
/// orthogonal complement of `{H ⊗ I_B}`; `d_a²(d_b² − 1)` elements.
fn trace_b_free_basis(dim_a: usize, dim_b: usize) -> Vec<SparseHermitian> {
    let n = dim_a * dim_b;
    let idx = |a: usize, b: usize| a * dim_b + b;
    let mut out = Vec::with_capacity(dim_a * dim_a * (dim_b * dim_b - 1));
    // Entries off the B-diagonal are unconstrained.
    for b in 0..dim_b {
        for b2 in b + 1..dim_b {
            for a in 0..dim_a {
                for a2 in 0..dim_a {
                    for v in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                        let mut y = SparseHermitian::zeros(n);
                        y.add_symmetric(idx(a, b), idx(a2, b2), v);
                        out.push(y);
                    }
                }
            }
        }
    }
    // B-diagonal blocks: (F at block b) − (F at block 0) for b ≥ 1.
    for b in 1..dim_b {
        for (f, _) in hermitian_basis(dim_a) {
            let mut y = SparseHermitian::zeros(n);
            for &(a, a2, v) in f.entries() {
                if a <= a2 {
                    y.add_symmetric(idx(a, b), idx(a2, b), v);
                    y.add_symmetric(idx(a, 0), idx(a2, 0), -v);
                }
            }
            out.push(y);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi, pauli_channel};

    #[test]
    fn qubit_rank_one_counts() {
        let r = build_sdp(&choi(&pauli_channel([1.0, 0.0, 0.0, 0.0]).unwrap()), 1e-9).unwrap();
        assert_eq!(r.problem.block_sides(), &[4, 3]);
        assert_eq!(r.subspace_constraints, 12);
        assert_eq!(r.marginal_constraints, 4);
        assert_eq!(r.projection_rank, 1);
    }

    #[test]
    fn complement_basis_is_trace_b_free_and_spanning() {
        for (da, db) in [(2, 2), (2, 3), (3, 2)] {
            let basis = trace_b_free_basis(da, db);
            let n = da * db;
            assert_eq!(basis.len(), n * n - da * da);
            let mut vecs = Vec::new();
            for y in &basis {
                let d = y.to_dense();
                assert!(partial_trace(&d, da, db, Subsystem::A).unwrap().max_abs() < 1e-15);
                // Real coordinates of a Hermitian matrix.
                let mut v = Vec::new();
                for p in 0..n {
                    for q in p..n {
                        v.push(Complex64::new(d[(p, q)].re, 0.0));
                        if p != q {
                            v.push(Complex64::new(d[(p, q)].im, 0.0));
                        }
                    }
                }
                vecs.push(v);
            }
            assert_eq!(crate::linalg::orthonormalize(&vecs, 1e-10).len(), basis.len());
        }
    }

    #[test]
    fn full_rank_has_no_w_block() {
        let r = build_from_projection(ComplexMatrix::identity(4), 2, 2).unwrap();
        assert!(!r.has_w_block());
        assert_eq!(r.problem.block_sides(), &[4]);
    }

    #[test]
    fn rejects_non_projections() {
        assert!(matches!(
            build_from_projection(ComplexMatrix::identity(4).scale(0.5), 2, 2),
            Err(CapacityError::NotProjection { .. })
        ));
        assert!(matches!(
            build_from_projection(ComplexMatrix::zeros(4, 4), 2, 2),
            Err(CapacityError::ZeroProjection)
        ));
        assert!(matches!(
            build_from_projection(ComplexMatrix::identity(3), 2, 2),
            Err(CapacityError::Shape(_))
        ));
    }

    #[test]
    fn embed_then_reconstruct_is_identity() {
        let r = build_sdp(&choi(&pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap()), 1e-9).unwrap();
        let s = ComplexMatrix::identity(2);
        let u = r.projection.clone();
        let (s2, u2) = r.reconstruct(&r.embed(&s, &u));
        assert!((&s2 - &s).max_abs() < 1e-12);
        assert!((&u2 - &u).max_abs() < 1e-12);
    }
}
