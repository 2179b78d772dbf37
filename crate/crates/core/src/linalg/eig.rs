//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError, ONE, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted non-increasing, eigenvectors as the matching columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for i in 0..n {
            for (j, &l) in self.eigenvalues.iter().enumerate() {
                scaled[(i, j)] *= l;
            }
        }
        scaled.matmul_adjoint(&self.eigenvectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }
}

/// Eigendecomposition of a Hermitian matrix. Inputs within
/// [`super::HERMITIAN_TOL`] of Hermitian are symmetrized first.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigDecomposition, LinalgError> {
    let h = h.to_hermitian()?;
    let (values, vectors) = jacobi(h, true);
    Ok(sorted(values, vectors.expect("vectors requested")))
}

/// Eigenvalues only, sorted non-increasing. The Hermitian part of `h` is used
/// without a tolerance check.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let (mut values, _) = jacobi(h.hermitian_part(), false);
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Number of eigenvalues above `rel_tol · max(λ_max, 1e-300)`.
pub fn rank_with_tol(h: &ComplexMatrix, rel_tol: f64) -> usize {
    let values = hermitian_eigenvalues(h);
    let cutoff = rel_tol * values.first().copied().unwrap_or(0.0).max(1e-300);
    values.iter().filter(|&&l| l > cutoff).count()
}

fn sorted(values: Vec<f64>, vectors: ComplexMatrix) -> EigDecomposition {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, new)] = vectors[(i, old)];
        }
    }
    EigDecomposition {
        eigenvalues: order.iter().map(|&k| values[k]).collect(),
        eigenvectors,
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Each rotation first removes the phase of `a[p,q]` and then applies a real
/// plane rotation, so `G = diag(1, e^{-iφ}) · R(c, s)` on the `(p, q)` plane.
fn jacobi(mut a: ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = a.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();
    if scale == 0.0 || n < 2 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return (values, v);
    }
    let threshold = f64::EPSILON * scale * 1e-1;
    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let g = 100.0 * mag;
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                rotate(&mut a, p, q, g_pp, g_pq, g_qp, g_qq);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * g_pp + vkq * g_qp;
                        v[(k, q)] = vkp * g_pq + vkq * g_qq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

/// `A ← G† A G` restricted to the `(p, q)` plane.
fn rotate(
    a: &mut ComplexMatrix,
    p: usize,
    q: usize,
    g_pp: Complex64,
    g_pq: Complex64,
    g_qp: Complex64,
    g_qq: Complex64,
) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
}

#[allow(dead_code)]
fn is_unitary(v: &ComplexMatrix, tol: f64) -> bool {
    let n = v.cols();
    let gram = v.adjoint().matmul(v);
    let mut dev = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            dev += (gram[(i, j)] - target).norm_sqr();
        }
    }
    dev.sqrt() <= tol
}
