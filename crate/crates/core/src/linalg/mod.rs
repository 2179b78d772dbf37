//! Dense complex linear algebra.
//!
//! Everything downstream (channels, Choi matrices, SDP blocks) is carried by
//! [`ComplexMatrix`], a row-major dense matrix of `Complex64`. The kernels are
//! sized for sides up to a few hundred.

mod eig;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use thiserror::Error;

pub use eig::{hermitian_eig, hermitian_eigenvalues, rank_with_tol, EigDecomposition};

/// Distance from Hermitian below which inputs are symmetrized rather than rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative cutoff for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("non-finite entry")]
    NonFinite,
}

/// Bipartite subsystem selector for [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    /// Real matrix from row-major entries. Panics on a length mismatch.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "from_real: wrong entry count");
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Column vector from entries.
    pub fn column(entries: Vec<Complex64>) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    /// `|v⟩⟨w|` for two column vectors given as slices.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m[(i, j)] = vi * wj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hilbert–Schmidt inner product `Tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Real part of `Tr(self other)`; the natural pairing of two Hermitian matrices.
    pub fn real_trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                let b = other[(k, i)];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    /// Frobenius distance from Hermitian, `‖H − H†‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part of a non-square matrix");
        let mut m = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// Symmetrizes when within [`HERMITIAN_TOL`] of Hermitian, rejects otherwise.
    pub fn to_hermitian(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL * self.frobenius_norm().max(1.0) {
            return Err(LinalgError::NotHermitian { deviation });
        }
        Ok(self.hermitian_part())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · other†` without forming the adjoint.
    pub fn matmul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = &self.data[i * self.cols..(i + 1) * self.cols];
            for j in 0..other.rows {
                let b_row = &other.data[j * other.cols..(j + 1) * other.cols];
                out.data[i * other.rows + j] =
                    a_row.iter().zip(b_row).map(|(a, b)| a * b.conj()).sum();
            }
        }
        out
    }

    /// `U† self U`.
    pub fn congruence_adjoint(&self, u: &Self) -> Self {
        u.adjoint().matmul(&self.matmul(u))
    }

    /// Lower-triangular Cholesky factor `L` with `self = L L†`.
    pub fn cholesky(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_triangular_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = ONE / self[(j, j)];
            for i in j + 1..n {
                let mut s = ZERO;
                for k in j..i {
                    s += self[(i, k)] * inv[(k, j)];
                }
                inv[(i, j)] = -s / self[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a Hermitian positive definite matrix via Cholesky.
    pub fn hpd_inverse(&self) -> Result<Self, LinalgError> {
        let l = self.cholesky()?;
        let linv = l.lower_triangular_inverse();
        Ok(linv.adjoint().matmul(&linv).hermitian_part())
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(-1.0, rhs);
    }
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace of an operator on `A ⊗ B`, keeping the named subsystem.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let n = dim_a * dim_b;
    if m.rows != n || m.cols != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} operator on a {dim_a}x{dim_b} bipartite space",
            m.rows, m.cols
        )));
    }
    Ok(match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(dim_a, dim_a);
            for a in 0..dim_a {
                for a2 in 0..dim_a {
                    out[(a, a2)] = (0..dim_b).map(|b| m[(a * dim_b + b, a2 * dim_b + b)]).sum();
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(dim_b, dim_b);
            for b in 0..dim_b {
                for b2 in 0..dim_b {
                    out[(b, b2)] = (0..dim_a).map(|a| m[(a * dim_b + b, a * dim_b + b2)]).sum();
                }
            }
            out
        }
    })
}

/// Reorders tensor factors: factor `perm[k]` of the input becomes factor `k`
/// of the output. `dims` are the input factor dimensions.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let n: usize = dims.iter().product();
    if m.rows != n || m.cols != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} operator with factor dims {dims:?}",
            m.rows, m.cols
        )));
    }
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(LinalgError::DimensionMismatch(format!("invalid permutation {perm:?}")));
    }
    let index_map = subsystem_index_map(dims, perm);
    let mut out = ComplexMatrix::zeros(n, n);
    for (i_new, &i_old) in index_map.iter().enumerate() {
        for (j_new, &j_old) in index_map.iter().enumerate() {
            out[(i_new, j_new)] = m[(i_old, j_old)];
        }
    }
    Ok(out)
}

/// For each output basis index, the input basis index it came from.
fn subsystem_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let n: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut map = Vec::with_capacity(n);
    let mut digits = vec![0usize; dims.len()];
    for idx in 0..n {
        let mut rem = idx;
        for k in (0..new_dims.len()).rev() {
            digits[k] = rem % new_dims[k];
            rem /= new_dims[k];
        }
        let mut old_digits = vec![0usize; dims.len()];
        for (k, &p) in perm.iter().enumerate() {
            old_digits[p] = digits[k];
        }
        let old = old_digits
            .iter()
            .zip(dims)
            .fold(0, |acc, (&d, &size)| acc * size + d);
        map.push(old);
    }
    map
}

/// Row-major vectorization: entry `a[s, t]` lands at index `s·d + t`.
pub fn vectorize(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::column(a.data.clone())
}

/// Inverse of [`vectorize`] for a `rows × cols` target.
pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix, LinalgError> {
    ComplexMatrix::from_vec(rows, cols, v.to_vec())
}

/// Orthonormal basis of the span of `vectors` by modified Gram–Schmidt with
/// one reorthogonalization pass. A vector whose residual norm falls below
/// `rel_tol` times the largest input norm is treated as dependent.
pub fn orthonormalize(vectors: &[Vec<Complex64>], rel_tol: f64) -> Vec<Vec<Complex64>> {
    let scale = vectors
        .iter()
        .map(|v| norm(v))
        .fold(0.0, f64::max);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > rel_tol * scale {
            basis.push(w.into_iter().map(|z| z / nw).collect());
        }
    }
    basis
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    fn phi(d: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; d * d];
        for k in 0..d {
            v[k * d + k] = ONE;
        }
        v
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(kron(&z(), &i2), ComplexMatrix::diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_xx_on_phi() {
        // X⊗X swaps |00⟩↔|11⟩, so ⟨Φ|X⊗X|Φ⟩ = ⟨00|11⟩+⟨11|00⟩ + ... = 2.
        let xx = kron(&x(), &x());
        let p = ComplexMatrix::column(phi(2));
        let val = p.adjoint().matmul(&xx.matmul(&p))[(0, 0)];
        assert!((val - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_phi() {
        let p = phi(2);
        let rho = ComplexMatrix::outer(&p, &p);
        let ta = partial_trace(&rho, 2, 2, Subsystem::A).unwrap();
        let tb = partial_trace(&rho, 2, 2, Subsystem::B).unwrap();
        assert_eq!(ta, ComplexMatrix::identity(2));
        assert_eq!(tb, ComplexMatrix::identity(2));
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = ComplexMatrix::from_rows(&[vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]).unwrap();
        let sigma = ComplexMatrix::from_real(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.25, 0.0, 0.0, 0.0, 0.25]);
        let m = kron(&rho, &sigma);
        let keep_a = partial_trace(&m, 2, 3, Subsystem::A).unwrap();
        let keep_b = partial_trace(&m, 2, 3, Subsystem::B).unwrap();
        assert!((&keep_a - &rho).frobenius_norm() < 1e-14);
        assert!((&keep_b - &sigma).frobenius_norm() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(
            partial_trace(&m, 2, 2, Subsystem::A),
            Err(LinalgError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn vectorize_conventions() {
        assert_eq!(vectorize(&ComplexMatrix::identity(2)).as_slice(), &[ONE, ZERO, ZERO, ONE]);
        assert_eq!(vectorize(&x()).as_slice(), &[ZERO, ONE, ONE, ZERO]);
        let vx = vectorize(&x());
        let vz = vectorize(&z());
        assert_eq!(vx.hs_inner(&vz), ZERO);
    }

    #[test]
    fn permute_swaps_kron_factors() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.5), c(2.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]]).unwrap();
        let b = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert_eq!(ba, kron(&b, &a));
        assert!(permute_subsystems(&ab, &[2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn cholesky_and_inverse() {
        let h = ComplexMatrix::from_rows(&[vec![c(4.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]]).unwrap();
        let l = h.cholesky().unwrap();
        assert!((&l.matmul_adjoint(&l) - &h).frobenius_norm() < 1e-14);
        let inv = h.hpd_inverse().unwrap();
        assert!((&inv.matmul(&h) - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
        assert_eq!(z().cholesky(), Err(LinalgError::NotPositiveDefinite));
    }

    #[test]
    fn to_hermitian_policy() {
        let mut h = x();
        h[(0, 1)] += c(1e-13, 0.0);
        assert!(h.to_hermitian().is_ok());
        h[(0, 1)] += c(1e-3, 0.0);
        assert!(matches!(h.to_hermitian(), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn orthonormalize_drops_dependent() {
        let i = vectorize(&ComplexMatrix::identity(2)).as_slice().to_vec();
        let zz = vectorize(&z()).as_slice().to_vec();
        let sum: Vec<_> = i.iter().zip(&zz).map(|(a, b)| a + b).collect();
        assert_eq!(orthonormalize(&[i, zz, sum], 1e-9).len(), 2);
    }

    #[test]
    fn from_vec_validates() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert_eq!(
            ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite)
        );
    }
}
