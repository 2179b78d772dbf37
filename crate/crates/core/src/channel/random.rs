//! Seeded random channels, unitaries and probability vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{is_unital, Channel};
use crate::linalg::{orthonormalize, ComplexMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// `rows × cols` isometry (orthonormal columns) from Gaussian columns.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let columns: Vec<Vec<Complex64>> = (0..cols)
            .map(|_| (0..rows).map(|_| gaussian(rng)).collect())
            .collect();
        let basis = orthonormalize(&columns, 1e-8);
        if basis.len() == cols {
            let mut m = ComplexMatrix::zeros(rows, cols);
            for (j, col) in basis.iter().enumerate() {
                m.set_col(j, col);
            }
            return m;
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_isometry(rng, d, d)
}

/// Channel `ρ ↦ Tr_E(V ρ V†)` for a random isometry `V: C^{d_in} → C^{d_out} ⊗ C^{env}`.
/// The Choi rank is `env` with probability one (when `env ≤ d_in·d_out`).
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim_in: usize, dim_out: usize, env: usize) -> Channel {
    let v = random_isometry(rng, dim_out * env, dim_in);
    let kraus = (0..env)
        .map(|k| {
            let mut e = ComplexMatrix::zeros(dim_out, dim_in);
            for b in 0..dim_out {
                for a in 0..dim_in {
                    e[(b, a)] = v[(b * env + k, a)];
                }
            }
            e
        })
        .collect();
    Channel::from_kraus(kraus).expect("isometry yields a trace-preserving Kraus set")
}

/// Rejection-samples a random qubit channel that is not unital at tolerance 1e-9.
pub fn random_nonunital_qubit_channel<R: Rng + ?Sized>(rng: &mut R, env: usize) -> Channel {
    loop {
        let ch = random_channel(rng, 2, 2, env);
        if !is_unital(&ch, 1e-9).expect("qubit channel is square") {
            return ch;
        }
    }
}

/// Random probability vector of length `len` supported exactly on `support`
/// (a bitmask over indices). Nonzero weights are drawn from `[0.05, 1)` and
/// normalized.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, len: usize, support: u64) -> Vec<f64> {
    let mut p: Vec<f64> = (0..len)
        .map(|i| if support >> i & 1 == 1 { rng.random_range(0.05..1.0) } else { 0.0 })
        .collect();
    let total: f64 = p.iter().sum();
    assert!(total > 0.0, "empty support");
    p.iter_mut().for_each(|x| *x /= total);
    // Push the rounding error into the largest entry so the sum is 1 to the last bit.
    let drift = 1.0 - p.iter().sum::<f64>();
    if let Some(max) = p.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += drift;
    }
    p
}

/// Random density matrix of full rank.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_vec(d, d, (0..d * d).map(|_| gaussian(rng)).collect())
        .expect("finite Gaussian entries");
    let rho = g.matmul_adjoint(&g);
    let t = rho.trace().re;
    rho.scale(1.0 / t)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_vec(d, d, (0..d * d).map(|_| gaussian(rng)).collect())
        .expect("finite Gaussian entries");
    g.hermitian_part()
}
