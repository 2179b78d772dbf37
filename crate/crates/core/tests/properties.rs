use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qns_capacity::capacity::{upsilon, INTEGER_SNAP_TOL};
use qns_capacity::channel::random::{
    random_channel, random_density_matrix, random_hermitian, random_isometry, random_probabilities, random_unitary,
};
use qns_capacity::channel::{
    choi, choi_of_tensor, is_unital, kraus_from_choi, pauli_channel, support_projection, tensor, Channel,
    ChoiMatrix,
};
use qns_capacity::linalg::{
    hermitian_eig, kron, partial_trace, rank_with_tol, vectorize, ComplexMatrix, Subsystem, DEFAULT_RANK_TOL,
};
use qns_capacity::ncgraph::{noncommutative_graph, noncommutative_graph_dim, operator_space_basis};
use qns_capacity::sdp::{solve, verify_solution, SdpProblem, SolveStatus, SolverConfig, SparseHermitian};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    // Rectangular Gaussian block of a Hermitian matrix.
    random_hermitian(r, rows + cols).submatrix(0, rows, rows, rows + cols)
}

fn diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

fn choi_diff(a: &ChoiMatrix, b: &ChoiMatrix) -> f64 {
    diff(a.matrix(), b.matrix())
}

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn costly() -> ProptestConfig {
    ProptestConfig::with_cases(16)
}

// linalg

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn kron_is_associative_and_multiplies_traces(seed: u64, d in proptest::array::uniform3(1usize..4)) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, d[0], d[0]);
        let b = random_matrix(&mut r, d[1], d[1]);
        let c = random_matrix(&mut r, d[2], d[2]);
        prop_assert!(diff(&kron(&kron(&a, &b), &c), &kron(&a, &kron(&b, &c))) < 1e-12);
        let t = kron(&a, &b).trace() - a.trace() * b.trace();
        prop_assert!(t.norm() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(seed: u64, da in 1usize..5, db in 1usize..5) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, da, da);
        let b = random_matrix(&mut r, db, db);
        let ab = kron(&a, &b);
        let keep_a = partial_trace(&ab, da, db, Subsystem::A).unwrap();
        let keep_b = partial_trace(&ab, da, db, Subsystem::B).unwrap();
        prop_assert!(diff(&keep_a, &a.scale_complex(b.trace())) < 1e-10);
        prop_assert!(diff(&keep_b, &b.scale_complex(a.trace())) < 1e-10);
    }

    #[test]
    fn eig_reconstructs_and_is_unitary(seed: u64, n in 1usize..24) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!((&e.reconstruct() - &h).frobenius_norm() <= 1e-9 * h.frobenius_norm().max(1.0));
        let v = &e.eigenvectors;
        prop_assert!(diff(&v.adjoint().matmul(v), &ComplexMatrix::identity(n)) < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn vectorize_preserves_inner_product(seed: u64, rows in 1usize..5, cols in 1usize..5) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, rows, cols);
        let b = random_matrix(&mut r, rows, cols);
        let lhs = vectorize(&a).hs_inner(&vectorize(&b));
        prop_assert!((lhs - a.hs_inner(&b)).norm() < 1e-10);
    }

    #[test]
    fn projector_rank_counts_vectors(seed: u64, n in 1usize..9, k in 0usize..9) {
        let k = k.min(n);
        let mut r = rng(seed);
        let v = random_isometry(&mut r, n, k);
        let p = v.matmul_adjoint(&v);
        prop_assert_eq!(rank_with_tol(&p, DEFAULT_RANK_TOL), k);
    }
}

#[test]
fn eig_of_side_256() {
    let mut r = rng(256);
    let h = random_hermitian(&mut r, 256);
    let e = hermitian_eig(&h).unwrap();
    assert!((&e.reconstruct() - &h).frobenius_norm() <= 1e-9 * h.frobenius_norm());
    let v = &e.eigenvectors;
    assert!(diff(&v.adjoint().matmul(v), &ComplexMatrix::identity(256)) < 1e-10);
}

// channel

/// `(d_in, d_out, env)` with `d_out·env ≥ d_in` so the Stinespring isometry exists.
fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..4, 2usize..4, 1usize..5).prop_map(|(a, b, e)| (a, b, e.max(a.div_ceil(b))))
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn choi_and_kraus_round_trip(seed: u64, (din, dout, env) in dims()) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, din, dout, env);
        let j = choi(&ch);
        let back = kraus_from_choi(&j, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(choi_diff(&choi(&back), &j) < 1e-8);
        prop_assert_eq!(back.kraus().len(), env.min(din * dout));
        for _ in 0..5 {
            let rho = random_density_matrix(&mut r, din);
            prop_assert!(diff(&back.apply(&rho), &ch.apply(&rho)) < 1e-8);
        }
    }

    #[test]
    fn channels_preserve_trace_and_choi_marginal(seed: u64, (din, dout, env) in dims()) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, din, dout, env);
        prop_assert!(ch.trace_preservation_deviation() < 1e-9);
        let j = choi(&ch);
        prop_assert!(ChoiMatrix::new(j.matrix().clone(), din, dout).is_ok());
        let marginal = partial_trace(j.matrix(), din, dout, Subsystem::A).unwrap();
        prop_assert!(diff(&marginal, &ComplexMatrix::identity(din)) < 1e-9);
        let rho = random_density_matrix(&mut r, din);
        let out = ch.apply(&rho);
        prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(out.hermitian_deviation() < 1e-12);
    }

    #[test]
    fn pauli_channels_are_unital(seed: u64, support in 1u64..16) {
        let mut r = rng(seed);
        let p = random_probabilities(&mut r, 4, support);
        let ch = pauli_channel([p[0], p[1], p[2], p[3]]).unwrap();
        prop_assert!(is_unital(&ch, 1e-9).unwrap());
        prop_assert_eq!(ch.kraus().len(), support.count_ones() as usize);
        prop_assert_eq!(choi(&ch).rank(DEFAULT_RANK_TOL), support.count_ones() as usize);
    }

    #[test]
    fn support_projection_is_a_stable_projection(seed: u64, (din, dout, env) in dims()) {
        let mut r = rng(seed);
        let j = choi(&random_channel(&mut r, din, dout, env));
        let p = support_projection(&j, DEFAULT_RANK_TOL);
        prop_assert!(diff(&p.matmul(&p), &p) < 1e-10);
        prop_assert!(p.hermitian_deviation() < 1e-12);
        let rank = env.min(din * dout);
        prop_assert!((p.trace().re - rank as f64).abs() < 1e-9);
        for tol in [1e-12, 1e-10, 1e-8, 1e-6] {
            prop_assert!(diff(&support_projection(&j, tol), &p) < 1e-8);
        }
    }

    #[test]
    fn tensor_choi_matches_choi_of_tensor(seed: u64, (da, db, ea) in dims(), eb in 1usize..3) {
        let mut r = rng(seed);
        let a = random_channel(&mut r, da, db, ea);
        let b = random_channel(&mut r, db, da, eb.max(db.div_ceil(da)));
        prop_assert!(choi_diff(&choi(&tensor(&a, &b)), &choi_of_tensor(&choi(&a), &choi(&b))) < 1e-10);
    }

    #[test]
    fn tensor_is_associative(seed: u64) {
        let mut r = rng(seed);
        let a = random_channel(&mut r, 2, 2, 2);
        let b = random_channel(&mut r, 2, 3, 1);
        let c = random_channel(&mut r, 3, 2, 2);
        let left = choi(&tensor(&tensor(&a, &b), &c));
        let right = choi(&tensor(&a, &tensor(&b, &c)));
        prop_assert!(choi_diff(&left, &right) < 1e-12);
    }
}

// ncgraph

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn graph_dimension_ignores_kraus_choice(seed: u64, d in 2usize..4, env in 1usize..5) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d, d, env);
        let other = kraus_from_choi(&choi(&ch), DEFAULT_RANK_TOL).unwrap();
        // Mix the Kraus operators by a unitary as well.
        let u = random_unitary(&mut r, env);
        let mixed: Vec<ComplexMatrix> = (0..env)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(d, d);
                for (k, e) in ch.kraus().iter().enumerate() {
                    m += &e.scale_complex(u[(i, k)]);
                }
                m
            })
            .collect();
        let mixed = Channel::from_kraus(mixed).unwrap();
        let dim = noncommutative_graph_dim(&ch, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(noncommutative_graph_dim(&other, DEFAULT_RANK_TOL).unwrap(), dim);
        prop_assert_eq!(noncommutative_graph_dim(&mixed, DEFAULT_RANK_TOL).unwrap(), dim);
    }

    #[test]
    fn graph_contains_identity_and_is_bounded(seed: u64, d in 2usize..4, env in 1usize..5) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, d, d, env);
        let s = noncommutative_graph(&ch, DEFAULT_RANK_TOL).unwrap();
        let id = ComplexMatrix::identity(d);
        prop_assert!(diff(&s.project(&id), &id) < 1e-9);
        let k = operator_space_basis(ch.kraus(), DEFAULT_RANK_TOL).unwrap().dim();
        prop_assert!(s.dim() <= k * k);
        prop_assert!(s.dim() <= d * d);
        // S is closed under adjoints.
        for g in &s.basis {
            prop_assert!(diff(&s.project(&g.adjoint()), &g.adjoint()) < 1e-9);
        }
    }
}

#[test]
fn qubit_graph_dimensions_by_choi_rank() {
    let mut r = rng(4);
    for env in 1..=4 {
        for _ in 0..200 {
            let ch = random_channel(&mut r, 2, 2, env);
            let dim = noncommutative_graph_dim(&ch, DEFAULT_RANK_TOL).unwrap();
            assert!([1, 2, 4].contains(&dim), "env {env}: dim {dim}");
            if env == 1 {
                assert_eq!(dim, 1);
            }
        }
    }
}

// capacity

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn upsilon_bounds_for_qubits(seed: u64, env in 1usize..5) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, 2, 2, env);
        let u = upsilon(&ch, &SolverConfig::default()).unwrap();
        prop_assert!(u.certified);
        prop_assert!(u.value >= 1.0 - INTEGER_SNAP_TOL);
        prop_assert!(u.value <= 4.0 + INTEGER_SNAP_TOL);
    }

    #[test]
    fn upsilon_at_least_one_off_qubits(seed: u64, (din, dout) in (2usize..4, 2usize..4), env in 1usize..4) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, din, dout, env.max(din.div_ceil(dout)));
        let u = upsilon(&ch, &SolverConfig::default()).unwrap();
        prop_assert!(u.value >= 1.0 - INTEGER_SNAP_TOL);
        prop_assert!(u.value <= (dout * dout) as f64 + INTEGER_SNAP_TOL);
    }

    #[test]
    fn upsilon_is_local_unitary_invariant(seed: u64, support in 1u64..16) {
        let mut r = rng(seed);
        let p = random_probabilities(&mut r, 4, support);
        let ch = pauli_channel([p[0], p[1], p[2], p[3]]).unwrap();
        let (before, after) = (random_unitary(&mut r, 2), random_unitary(&mut r, 2));
        let rotated = ch.conjugated(&before, &after).unwrap();
        let cfg = SolverConfig::default();
        let a = upsilon(&ch, &cfg).unwrap().value;
        let b = upsilon(&rotated, &cfg).unwrap().value;
        prop_assert!((a - b).abs() < 1e-6);
        prop_assert!((a - 4.0 / support.count_ones() as f64).abs() < 1e-6);
    }
}

// sdp

/// Strictly feasible primal and dual by construction: `b = A(X₀)` and
/// `C = Z₀ + Σ y₀ᵢ Aᵢ` with `X₀, Z₀ ≻ 0`.
fn random_feasible_sdp(r: &mut ChaCha8Rng, sides: &[usize], m: usize) -> SdpProblem {
    let mut problem = SdpProblem::new(sides.to_vec());
    let x0: Vec<ComplexMatrix> = sides.iter().map(|&n| random_density_matrix(r, n).scale(n as f64)).collect();
    let mut c: Vec<ComplexMatrix> = sides
        .iter()
        .map(|&n| &random_density_matrix(r, n) + &ComplexMatrix::identity(n).scale(0.1))
        .collect();
    for _ in 0..m {
        let y0 = random_hermitian(r, 1)[(0, 0)].re;
        let mut terms = Vec::new();
        let mut rhs = 0.0;
        for (l, &n) in sides.iter().enumerate() {
            let a = random_hermitian(r, n);
            rhs += a.real_trace_product(&x0[l]);
            c[l].axpy(y0, &a);
            terms.push((l, SparseHermitian::from_dense(&a).unwrap()));
        }
        problem.add_constraint(terms, rhs).unwrap();
    }
    for (l, cl) in c.into_iter().enumerate() {
        problem.set_objective(l, cl.hermitian_part()).unwrap();
    }
    problem
}

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn strictly_feasible_programs_certify(seed: u64, n1 in 1usize..5, n2 in 1usize..4, m in 1usize..6) {
        let mut r = rng(seed);
        let problem = random_feasible_sdp(&mut r, &[n1, n2], m);
        let cfg = SolverConfig::default();
        let sol = solve(&problem, &cfg).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        let report = verify_solution(&problem, &sol, &cfg);
        prop_assert!(report.certified);
        prop_assert!(report.gap <= 1e-8);
        // Weak duality on every iterate that is feasible on both sides.
        for it in &sol.trace {
            if it.primal_infeasibility < 1e-9 && it.dual_infeasibility < 1e-9 {
                prop_assert!(it.primal_objective >= it.dual_objective - 1e-7 * (1.0 + it.primal_objective.abs()));
            }
        }
        let again = solve(&problem, &cfg).unwrap();
        prop_assert_eq!(again.primal_objective.to_bits(), sol.primal_objective.to_bits());
        prop_assert_eq!(again.dual_vector, sol.dual_vector);
    }

    #[test]
    fn realified_program_has_twice_the_value(seed: u64, n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let problem = random_feasible_sdp(&mut r, &[n], m);
        let cfg = SolverConfig::default();
        let complex = solve(&problem, &cfg).unwrap();
        let real = solve(&problem.realify(), &cfg).unwrap();
        prop_assert_eq!(real.status, SolveStatus::Optimal);
        let scale = 1.0 + complex.primal_objective.abs();
        prop_assert!((real.primal_objective - 2.0 * complex.primal_objective).abs() < 1e-6 * scale);
    }
}

#[test]
fn hermitian_helpers_agree() {
    let mut r = rng(9);
    let h = random_hermitian(&mut r, 5);
    let e = hermitian_eig(&h).unwrap();
    let sum: f64 = e.eigenvalues.iter().sum();
    assert!((sum - h.trace().re).abs() < 1e-10);
    assert_eq!(h.trace().im, 0.0);
}
