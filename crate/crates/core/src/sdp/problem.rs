use num_complex::Complex64;

use super::SdpError;
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL, ZERO};

/// Hermitian matrix stored as its nonzero entries (both triangles).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    side: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseHermitian {
    pub fn zeros(side: usize) -> Self {
        Self {
            side,
            entries: Vec::new(),
        }
    }

    /// Symmetrizes inputs within 1e-10 of Hermitian; rejects anything farther.
    pub fn from_dense(m: &ComplexMatrix) -> Result<Self, SdpError> {
        let h = m.to_hermitian().map_err(|e| SdpError::InvalidProblem(e.to_string()))?;
        let mut entries = Vec::new();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                let v = h[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Ok(Self {
            side: h.rows(),
            entries,
        })
    }

    /// Adds `v` at `(p, q)` and `conj(v)` at `(q, p)`; a diagonal entry takes `Re v`.
    pub fn add_symmetric(&mut self, p: usize, q: usize, v: Complex64) {
        assert!(p < self.side && q < self.side, "entry outside block");
        if p == q {
            self.entries.push((p, p, Complex64::new(v.re, 0.0)));
        } else {
            self.entries.push((p, q, v));
            self.entries.push((q, p, v.conj()));
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.side, self.side);
        for &(p, q, v) in &self.entries {
            m[(p, q)] += v;
        }
        m
    }

    /// `Re Tr(self · x)` for any square `x`.
    pub fn pair(&self, x: &ComplexMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(p, q, v)| {
                let w = x[(q, p)];
                v.re * w.re - v.im * w.im
            })
            .sum()
    }

    /// `target += coef · self`.
    pub fn add_scaled_to(&self, target: &mut ComplexMatrix, coef: f64) {
        for &(p, q, v) in &self.entries {
            target[(p, q)] += v * coef;
        }
    }

    fn max_hermitian_defect(&self) -> f64 {
        let d = self.to_dense();
        d.hermitian_deviation() / d.frobenius_norm().max(1.0)
    }
}

/// One linear equality `Σ_ℓ ⟨A_ℓ, X_ℓ⟩ = rhs`; blocks not listed have zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHermitian)>,
    pub rhs: f64,
}

/// `min Σ_ℓ ⟨C_ℓ, X_ℓ⟩` subject to the linear equalities and `X_ℓ ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    block_sides: Vec<usize>,
    objective: Vec<ComplexMatrix>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(block_sides: Vec<usize>) -> Self {
        let objective = block_sides.iter().map(|&s| ComplexMatrix::zeros(s, s)).collect();
        Self {
            block_sides,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, block: usize, c: ComplexMatrix) -> Result<(), SdpError> {
        let side = *self
            .block_sides
            .get(block)
            .ok_or_else(|| SdpError::InvalidProblem(format!("no block {block}")))?;
        if c.rows() != side || c.cols() != side {
            return Err(SdpError::InvalidProblem(format!(
                "objective block {block} is {}x{}, expected side {side}",
                c.rows(),
                c.cols()
            )));
        }
        self.objective[block] = c
            .to_hermitian()
            .map_err(|e| SdpError::InvalidProblem(format!("objective block {block}: {e}")))?;
        Ok(())
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, SparseHermitian)>, rhs: f64) -> Result<(), SdpError> {
        if !rhs.is_finite() {
            return Err(SdpError::InvalidProblem("non-finite right-hand side".into()));
        }
        for (block, a) in &terms {
            let side = *self
                .block_sides
                .get(*block)
                .ok_or_else(|| SdpError::InvalidProblem(format!("no block {block}")))?;
            if a.side() != side {
                return Err(SdpError::InvalidProblem(format!(
                    "constraint matrix of side {} in block {block} of side {side}",
                    a.side()
                )));
            }
            if a.entries.iter().any(|(_, _, v)| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(SdpError::InvalidProblem("non-finite constraint entry".into()));
            }
            if a.max_hermitian_defect() > HERMITIAN_TOL {
                return Err(SdpError::InvalidProblem("constraint matrix is not Hermitian".into()));
            }
        }
        self.constraints.push(Constraint { terms, rhs });
        Ok(())
    }

    pub fn block_sides(&self) -> &[usize] {
        &self.block_sides
    }

    pub fn objective(&self) -> &[ComplexMatrix] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// `Σ_ℓ ⟨A_{i,ℓ}, X_ℓ⟩`.
    pub fn constraint_value(&self, i: usize, blocks: &[ComplexMatrix]) -> f64 {
        self.constraints[i]
            .terms
            .iter()
            .map(|(l, a)| a.pair(&blocks[*l]))
            .sum()
    }

    pub fn objective_value(&self, blocks: &[ComplexMatrix]) -> f64 {
        self.objective
            .iter()
            .zip(blocks)
            .map(|(c, x)| c.real_trace_product(x))
            .sum()
    }

    /// `C − Σᵢ yᵢ Aᵢ`, block by block.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut z = self.objective.clone();
        for (con, &yi) in self.constraints.iter().zip(y) {
            for (l, a) in &con.terms {
                a.add_scaled_to(&mut z[*l], -yi);
            }
        }
        z
    }

    /// Real symmetric embedding `H ↦ [[Re H, −Im H], [Im H, Re H]]` of every
    /// block. Pairings double under the embedding, so right-hand sides are
    /// doubled and the optimal value of the result is twice the original.
    pub fn realify(&self) -> SdpProblem {
        let mut out = SdpProblem::new(self.block_sides.iter().map(|s| 2 * s).collect());
        out.objective = self.objective.iter().map(realify_dense).collect();
        out.constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                terms: c
                    .terms
                    .iter()
                    .map(|(l, a)| (*l, realify_sparse(a)))
                    .collect(),
                rhs: 2.0 * c.rhs,
            })
            .collect();
        out
    }

    pub(crate) fn validate(&self) -> Result<(), SdpError> {
        if self.block_sides.is_empty() || self.block_sides.contains(&0) {
            return Err(SdpError::InvalidProblem("blocks must have positive sides".into()));
        }
        Ok(())
    }
}

fn realify_dense(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.rows();
    let mut r = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            r[(i, j)] = Complex64::new(v.re, 0.0);
            r[(i + n, j + n)] = Complex64::new(v.re, 0.0);
            r[(i, j + n)] = Complex64::new(-v.im, 0.0);
            r[(i + n, j)] = Complex64::new(v.im, 0.0);
        }
    }
    r
}

fn realify_sparse(a: &SparseHermitian) -> SparseHermitian {
    let n = a.side;
    let mut entries = Vec::with_capacity(4 * a.entries.len());
    for &(p, q, v) in &a.entries {
        if v.re != 0.0 {
            entries.push((p, q, Complex64::new(v.re, 0.0)));
            entries.push((p + n, q + n, Complex64::new(v.re, 0.0)));
        }
        if v.im != 0.0 {
            entries.push((p, q + n, Complex64::new(-v.im, 0.0)));
            entries.push((p + n, q, Complex64::new(v.im, 0.0)));
        }
    }
    SparseHermitian { side: 2 * n, entries }
}
