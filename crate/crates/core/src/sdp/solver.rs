use log::debug;

use super::{
    relative_gap, IterationLog, SdpError, SdpProblem, SdpSolution, SolveStatus, SolverConfig,
    SparseHermitian,
};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};

/// Relative pivot threshold for dropping dependent constraints.
const REDUNDANCY_TOL: f64 = 1e-10;
/// Objective magnitude beyond which a diverging iterate is tested as an
/// infeasibility certificate.
const DIVERGENCE: f64 = 1e10;
const MIN_STEP: f64 = 1e-12;
/// Once the tolerances are met, keep iterating until the worst criterion is
/// this fraction of its tolerance or the extra-iteration budget runs out.
const POLISH_MERIT: f64 = 1e-4;
const POLISH_ITERATIONS: usize = 8;
/// The Schur matrix is dense `m × m`; beyond this row count a solve takes
/// minutes per iteration.
pub const MAX_CONSTRAINTS: usize = 2048;

/// Constraint `i` of the reduced system, normalized to unit Frobenius norm.
struct Row {
    original: usize,
    norm: f64,
    rhs: f64,
    terms: Vec<(usize, SparseHermitian, Option<ComplexMatrix>)>,
}

struct Workspace<'a> {
    problem: &'a SdpProblem,
    rows: Vec<Row>,
    sides: Vec<usize>,
}

impl Workspace<'_> {
    /// `⟨Aᵢ, M⟩` for every reduced row, `M` any block-diagonal matrix.
    fn apply(&self, m: &[ComplexMatrix]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.terms.iter().map(|(l, a, _)| a.pair(&m[*l])).sum())
            .collect()
    }

    /// `Σᵢ yᵢ Aᵢ`.
    fn adjoint(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self.sides.iter().map(|&s| ComplexMatrix::zeros(s, s)).collect();
        for (row, &yi) in self.rows.iter().zip(y) {
            for (l, a, _) in &row.terms {
                a.add_scaled_to(&mut out[*l], yi);
            }
        }
        out
    }

    fn rhs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rhs).collect()
    }

    /// Schur matrix `M_ij = ⟨Aᵢ, X Aⱼ Z⁻¹⟩`.
    fn schur(&self, x: &[ComplexMatrix], zinv: &[ComplexMatrix]) -> Vec<f64> {
        let m = self.rows.len();
        let mut out = vec![0.0; m * m];
        for (j, row_j) in self.rows.iter().enumerate() {
            let mut g: Vec<Option<ComplexMatrix>> = vec![None; self.sides.len()];
            for (l, a, dense) in &row_j.terms {
                let side = self.sides[*l];
                let block = match dense {
                    Some(d) => x[*l].matmul(d).matmul(&zinv[*l]),
                    None => {
                        let mut acc = ComplexMatrix::zeros(side, side);
                        for &(p, q, v) in a.entries() {
                            for r in 0..side {
                                let xr = x[*l][(r, p)] * v;
                                for c in 0..side {
                                    acc[(r, c)] += xr * zinv[*l][(q, c)];
                                }
                            }
                        }
                        acc
                    }
                };
                g[*l] = Some(block);
            }
            for i in j..m {
                let val: f64 = self.rows[i]
                    .terms
                    .iter()
                    .filter_map(|(l, a, _)| g[*l].as_ref().map(|gb| a.pair(gb)))
                    .sum();
                out[i * m + j] = val;
                out[j * m + i] = val;
            }
        }
        out
    }
}

fn blocks_inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.real_trace_product(y)).sum()
}

fn blocks_norm(a: &[ComplexMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

/// In-place Cholesky of a dense symmetric matrix (lower triangle).
fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Factors the Schur matrix, adding a small diagonal shift if needed.
fn factor_schur(mut m: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let max_diag = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max).max(1e-300);
    let original = m.clone();
    if cholesky(&mut m, n) {
        return Some(m);
    }
    let mut shift = 1e-14 * max_diag;
    for _ in 0..6 {
        let mut trial = original.clone();
        for i in 0..n {
            trial[i * n + i] += shift;
        }
        if cholesky(&mut trial, n) {
            return Some(trial);
        }
        shift *= 100.0;
    }
    None
}

/// Largest `α` keeping `X + α dX ⪰ 0` (infinite if `dX ⪰ 0`).
fn max_step(x: &[ComplexMatrix], dx: &[ComplexMatrix]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let l = match xb.cholesky() {
            Ok(l) => l,
            Err(_) => return 0.0,
        };
        let linv = l.lower_triangular_inverse();
        let w = linv.matmul(db).matmul_adjoint(&linv);
        let lmin = hermitian_eigenvalues(&w).last().copied().unwrap_or(0.0);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

/// Pivoted Cholesky on the constraint Gram matrix. Returns the indices of a
/// maximal independent subset, or the index of a dependent row whose
/// right-hand side is inconsistent with the kept rows.
fn select_independent(problem: &SdpProblem) -> Result<Vec<usize>, usize> {
    let m = problem.num_constraints();
    let dense: Vec<Vec<Option<ComplexMatrix>>> = problem
        .constraints()
        .iter()
        .map(|c| {
            let mut blocks = vec![None; problem.block_sides().len()];
            for (l, a) in &c.terms {
                let d = a.to_dense();
                blocks[*l] = Some(match blocks[*l].take() {
                    Some(prev) => &prev + &d,
                    None => d,
                });
            }
            blocks
        })
        .collect();
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v: f64 = dense[i]
                .iter()
                .zip(&dense[j])
                .filter_map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(a.real_trace_product(b)),
                    _ => None,
                })
                .sum();
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }
    let max_diag = (0..m).map(|i| gram[i * m + i]).fold(0.0, f64::max);
    // Rows of L for the chosen pivots, in pivot order.
    let mut chosen: Vec<usize> = Vec::new();
    let mut l_rows: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut residual: Vec<f64> = (0..m).map(|i| gram[i * m + i]).collect();
    let mut active: Vec<bool> = vec![true; m];
    loop {
        let pivot = (0..m)
            .filter(|&i| active[i])
            .max_by(|&a, &b| residual[a].total_cmp(&residual[b]));
        let Some(p) = pivot else { break };
        if residual[p] <= REDUNDANCY_TOL * max_diag.max(1e-300) {
            break;
        }
        active[p] = false;
        let d = residual[p].sqrt();
        let k = chosen.len();
        chosen.push(p);
        for i in 0..m {
            if !active[i] {
                continue;
            }
            let mut s = gram[i * m + p];
            for t in 0..k {
                s -= l_rows[i][t] * l_rows[p][t];
            }
            let lik = s / d;
            l_rows[i].push(lik);
            residual[i] -= lik * lik;
        }
        l_rows[p].push(d);
    }
    // Consistency of the dropped rows: b_d must equal the same combination of kept b's.
    let k = chosen.len();
    if k < m {
        let mut lk = vec![0.0; k * k];
        for (r, &pi) in chosen.iter().enumerate() {
            for c in 0..=r {
                lk[r * k + c] = l_rows[pi][c];
            }
        }
        let b_kept: Vec<f64> = chosen.iter().map(|&i| problem.constraints()[i].rhs).collect();
        let scale = problem
            .constraints()
            .iter()
            .map(|c| c.rhs.abs())
            .fold(1.0, f64::max);
        for d in (0..m).filter(|&i| active[i]) {
            // Coefficients c with A_d ≈ Σ c_j A_{chosen_j}: solve (L Lᵀ) c = G_{chosen, d}.
            let g: Vec<f64> = chosen.iter().map(|&j| gram[j * m + d]).collect();
            let c = cholesky_solve(&lk, k, &g);
            let predicted: f64 = c.iter().zip(&b_kept).map(|(a, b)| a * b).sum();
            if (predicted - problem.constraints()[d].rhs).abs() > 1e-8 * scale {
                return Err(d);
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

fn initial_scale(ws: &Workspace, block: usize) -> (f64, f64) {
    let side = ws.sides[block] as f64;
    let mut xi: f64 = 10.0f64.max(side.sqrt());
    let mut eta: f64 = 10.0f64.max(side.sqrt());
    for row in &ws.rows {
        for (l, a, _) in &row.terms {
            if *l == block {
                let norm_a = a.to_dense().frobenius_norm();
                xi = xi.max(side * (1.0 + row.rhs.abs()) / (1.0 + norm_a));
                eta = eta.max(norm_a);
            }
        }
    }
    eta = eta.max(ws.problem.objective()[block].frobenius_norm());
    (xi, eta)
}

struct Iterate {
    x: Vec<ComplexMatrix>,
    y: Vec<f64>,
    z: Vec<ComplexMatrix>,
}

struct Measures {
    pobj: f64,
    dobj: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
    rd: Vec<ComplexMatrix>,
}

fn measure(ws: &Workspace, it: &Iterate, c_norm: f64) -> Measures {
    let ax = ws.apply(&it.x);
    let rp: Vec<f64> = ws.rows.iter().zip(&ax).map(|(r, v)| r.rhs - v).collect();
    let aty = ws.adjoint(&it.y);
    let rd: Vec<ComplexMatrix> = ws
        .problem
        .objective()
        .iter()
        .zip(&it.z)
        .zip(&aty)
        .map(|((c, z), a)| &(c - z) - a)
        .collect();
    let pobj = ws.problem.objective_value(&it.x);
    let dobj: f64 = ws.rows.iter().zip(&it.y).map(|(r, y)| r.rhs * y).sum();
    let pinf = ws
        .rows
        .iter()
        .zip(&rp)
        .map(|(r, v)| (v * r.norm).abs())
        .fold(0.0, f64::max);
    let dinf = blocks_norm(&rd) / (1.0 + c_norm);
    Measures {
        pobj,
        dobj,
        gap: relative_gap(pobj, dobj),
        pinf,
        dinf,
        rd,
    }
}

/// Solves the problem with an infeasible-start primal–dual interior-point
/// method. Dependent equality rows are removed first; an inconsistent
/// dependent row yields `PrimalInfeasible` without iterating.
pub fn solve(problem: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution, SdpError> {
    cfg.validate()?;
    problem.validate()?;
    let sides = problem.block_sides().to_vec();
    let m_orig = problem.num_constraints();
    if m_orig > MAX_CONSTRAINTS {
        return Err(SdpError::TooLarge {
            rows: m_orig,
            limit: MAX_CONSTRAINTS,
        });
    }

    let kept = match select_independent(problem) {
        Ok(k) => k,
        Err(row) => {
            debug!("constraint {row} is dependent and inconsistent");
            return Ok(infeasible_by_inconsistency(problem));
        }
    };

    let rows: Vec<Row> = kept
        .iter()
        .map(|&i| {
            let c = &problem.constraints()[i];
            let norm = c
                .terms
                .iter()
                .map(|(_, a)| a.to_dense().frobenius_norm().powi(2))
                .sum::<f64>()
                .sqrt();
            let terms = c
                .terms
                .iter()
                .map(|(l, a)| {
                    let scaled = SparseHermitian::from_dense(&a.to_dense().scale(1.0 / norm))
                        .expect("scaled Hermitian stays Hermitian");
                    let dense = (scaled.nnz() > sides[*l]).then(|| scaled.to_dense());
                    (*l, scaled, dense)
                })
                .collect();
            Row {
                original: i,
                norm,
                rhs: c.rhs / norm,
                terms,
            }
        })
        .collect();
    let ws = Workspace {
        problem,
        rows,
        sides: sides.clone(),
    };
    let m = ws.rows.len();
    let total_side: f64 = sides.iter().sum::<usize>() as f64;
    let c_norm = blocks_norm(problem.objective());
    let b = ws.rhs();

    let mut it = Iterate {
        x: Vec::new(),
        y: vec![0.0; m],
        z: Vec::new(),
    };
    for (l, &s) in sides.iter().enumerate() {
        let (xi, eta) = initial_scale(&ws, l);
        it.x.push(ComplexMatrix::identity(s).scale(xi));
        it.z.push(ComplexMatrix::identity(s).scale(eta));
    }

    let mut trace = Vec::new();
    let mut best: Option<(f64, Iterate, Measures, usize)> = None;
    let mut status = SolveStatus::SlowProgress;
    let mut iterations = 0;
    let mut final_measures = None;
    let mut converged_at: Option<usize> = None;

    for iter in 0..=cfg.max_iterations {
        iterations = iter;
        let meas = measure(&ws, &it, c_norm);
        let mu = blocks_inner(&it.x, &it.z) / total_side;
        let merit = (meas.gap / cfg.gap_tol)
            .max(meas.pinf / cfg.feas_tol)
            .max(meas.dinf / cfg.feas_tol);
        if best.as_ref().is_none_or(|(bm, ..)| merit < *bm) {
            best = Some((
                merit,
                Iterate {
                    x: it.x.clone(),
                    y: it.y.clone(),
                    z: it.z.clone(),
                },
                Measures {
                    rd: Vec::new(),
                    ..meas
                },
                iter,
            ));
        }

        if merit <= 1.0 {
            status = SolveStatus::Optimal;
            converged_at.get_or_insert(iter);
            if merit <= POLISH_MERIT || converged_at.is_some_and(|c| iter >= c + POLISH_ITERATIONS) {
                break;
            }
        }
        if meas.dobj > DIVERGENCE * (1.0 + c_norm) {
            let ray = blocks_norm(&problem.objective().iter().zip(&meas.rd).map(|(c, r)| c - r).collect::<Vec<_>>());
            if ray / meas.dobj <= cfg.feas_tol {
                status = SolveStatus::PrimalInfeasible;
                final_measures = Some(meas);
                break;
            }
        }
        if meas.pobj < -DIVERGENCE * (1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            let ax_norm = ws.apply(&it.x).iter().map(|v| v * v).sum::<f64>().sqrt();
            if ax_norm / meas.pobj.abs() <= cfg.feas_tol {
                status = SolveStatus::DualInfeasible;
                final_measures = Some(meas);
                break;
            }
        }
        if iter == cfg.max_iterations {
            break;
        }

        let zinv: Vec<ComplexMatrix> = match it.z.iter().map(|z| z.hpd_inverse()).collect() {
            Ok(v) => v,
            Err(_) => break,
        };
        let schur = ws.schur(&it.x, &zinv);
        let Some(chol) = factor_schur(schur, m) else {
            if iter == 0 {
                return Err(SdpError::RankDeficient);
            }
            break;
        };

        // X Rd Z⁻¹ and A(Z⁻¹) are shared by predictor and corrector.
        let x_rd_zinv: Vec<ComplexMatrix> = it
            .x
            .iter()
            .zip(&meas.rd)
            .zip(&zinv)
            .map(|((x, rd), zi)| x.matmul(rd).matmul(zi))
            .collect();
        let a_x_rd_zinv = ws.apply(&x_rd_zinv);
        let a_zinv = ws.apply(&zinv);

        let direction = |sigma_mu: f64, corr: Option<&[ComplexMatrix]>| {
            let a_corr = corr.map(|c| ws.apply(c));
            let rhs: Vec<f64> = (0..m)
                .map(|i| {
                    b[i] - sigma_mu * a_zinv[i]
                        + a_x_rd_zinv[i]
                        + a_corr.as_ref().map_or(0.0, |ac| ac[i])
                })
                .collect();
            let dy = cholesky_solve(&chol, m, &rhs);
            let aty = ws.adjoint(&dy);
            let dz: Vec<ComplexMatrix> = meas.rd.iter().zip(&aty).map(|(rd, a)| rd - a).collect();
            let dx: Vec<ComplexMatrix> = (0..sides.len())
                .map(|l| {
                    let mut d = zinv[l].scale(sigma_mu);
                    d -= &it.x[l];
                    d -= &it.x[l].matmul(&dz[l]).matmul(&zinv[l]);
                    if let Some(c) = corr {
                        d -= &c[l];
                    }
                    d.hermitian_part()
                })
                .collect();
            (dx, dy, dz)
        };

        // Predictor.
        let (dx_a, _, dz_a) = direction(0.0, None);
        let ap = (cfg.step_fraction * max_step(&it.x, &dx_a)).min(1.0);
        let ad = (cfg.step_fraction * max_step(&it.z, &dz_a)).min(1.0);
        let x_aff: Vec<ComplexMatrix> = it.x.iter().zip(&dx_a).map(|(x, d)| { let mut t = x.clone(); t.axpy(ap, d); t }).collect();
        let z_aff: Vec<ComplexMatrix> = it.z.iter().zip(&dz_a).map(|(z, d)| { let mut t = z.clone(); t.axpy(ad, d); t }).collect();
        let mu_aff = blocks_inner(&x_aff, &z_aff) / total_side;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector: second-order term dX_a dZ_a Z⁻¹.
        let corr: Vec<ComplexMatrix> = (0..sides.len())
            .map(|l| dx_a[l].matmul(&dz_a[l]).matmul(&zinv[l]))
            .collect();
        let (dx, dy, dz) = direction(sigma * mu, Some(&corr));
        let ap = (cfg.step_fraction * max_step(&it.x, &dx)).min(1.0);
        let ad = (cfg.step_fraction * max_step(&it.z, &dz)).min(1.0);

        let log_entry = IterationLog {
            iteration: iter,
            primal_objective: meas.pobj,
            dual_objective: meas.dobj,
            primal_infeasibility: meas.pinf,
            dual_infeasibility: meas.dinf,
            mu,
            primal_step: ap,
            dual_step: ad,
        };
        if cfg.log_iterations {
            debug!(
                "iter {:3} pobj {:+.10e} dobj {:+.10e} pinf {:.2e} dinf {:.2e} mu {:.2e} ap {:.3} ad {:.3}",
                iter, meas.pobj, meas.dobj, meas.pinf, meas.dinf, mu, ap, ad
            );
        }
        trace.push(log_entry);

        if ap < MIN_STEP && ad < MIN_STEP {
            break;
        }
        for l in 0..sides.len() {
            it.x[l].axpy(ap, &dx[l]);
            it.x[l] = it.x[l].hermitian_part();
            it.z[l].axpy(ad, &dz[l]);
            it.z[l] = it.z[l].hermitian_part();
        }
        for (yi, d) in it.y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }

    let (it, meas) = match (status, final_measures) {
        (SolveStatus::SlowProgress | SolveStatus::Optimal, _) | (_, None) => {
            let (_, best_it, best_meas, _) = best.expect("at least one iterate measured");
            (best_it, best_meas)
        }
        (_, Some(meas)) => (it, meas),
    };

    let mut dual_vector = vec![0.0; m_orig];
    for (row, &yi) in ws.rows.iter().zip(&it.y) {
        dual_vector[row.original] = yi / row.norm;
    }
    Ok(SdpSolution {
        status,
        primal_blocks: it.x,
        dual_vector,
        dual_slack: it.z,
        primal_objective: meas.pobj,
        dual_objective: meas.dobj,
        gap: meas.gap,
        primal_residual: meas.pinf,
        dual_residual: meas.dinf,
        iterations,
        trace,
    })
}

fn infeasible_by_inconsistency(problem: &SdpProblem) -> SdpSolution {
    let x: Vec<ComplexMatrix> = problem
        .block_sides()
        .iter()
        .map(|&s| ComplexMatrix::zeros(s, s))
        .collect();
    SdpSolution {
        status: SolveStatus::PrimalInfeasible,
        dual_slack: problem.objective().to_vec(),
        primal_blocks: x,
        dual_vector: vec![0.0; problem.num_constraints()],
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        gap: f64::INFINITY,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        iterations: 0,
        trace: Vec::new(),
    }
}
