use super::*;
use crate::channel::{amplitude_damping, extremal_channel, generalized_pauli_channel, pauli_channel};
use crate::channel::choi;
use crate::sdp::verify_primal;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn assert_upsilon(ch: &Channel, expected: f64, tol: f64) {
    let r = upsilon(ch, &cfg()).unwrap();
    assert!(r.certified, "uncertified: {:?} {:?}", r.status, r.reconstruction);
    assert!((r.value - expected).abs() <= tol, "upsilon {} vs {expected}", r.value);
}

#[test]
fn pauli_examples() {
    assert_upsilon(&pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap(), 2.0, 1e-6);
    assert_upsilon(&pauli_channel([0.5, 0.25, 0.25, 0.0]).unwrap(), 4.0 / 3.0, 1e-6);
    assert_upsilon(&Channel::identity(2), 4.0, 1e-6);
}

#[test]
fn full_rank_choi_forces_one() {
    assert_upsilon(&pauli_channel([0.25; 4]).unwrap(), 1.0, 1e-6);
}

#[test]
fn amplitude_damping_collapses() {
    for g in 1..=9 {
        assert_upsilon(&amplitude_damping(f64::from(g) / 10.0).unwrap(), 1.0, 1e-6);
    }
}

#[test]
fn bell_projection_sums() {
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    for k in 1..=4 {
        let p = maximally_entangled_projection(2, &pairs[..k]);
        let r = upsilon_of_projection(&p, 2, 2, &cfg()).unwrap();
        assert!(r.certified);
        assert!((r.value - 4.0 / k as f64).abs() <= 1e-6, "k={k}: {}", r.value);
    }
}

#[test]
fn identity_projection_gives_one() {
    let r = upsilon_of_projection(&ComplexMatrix::identity(4), 2, 2, &cfg()).unwrap();
    assert!(r.certified);
    assert!((r.value - 1.0).abs() <= 1e-6);
}

#[test]
fn product_projection_is_unbounded() {
    // Tr_B |00⟩⟨00| is not full rank, so S can grow on |1⟩ without limit.
    let mut p = ComplexMatrix::zeros(4, 4);
    p[(0, 0)] = Complex64::new(1.0, 0.0);
    for t in [10.0, 1e3] {
        let s = ComplexMatrix::diagonal(&[1.0, t]);
        let u = ComplexMatrix::diagonal(&[1.0, 0.0, 0.0, 1.0]);
        let check = check_point(&p, &s, &u, 2, 2, 1.0 + t);
        assert!(check.passes(1e-12), "{check:?}");
    }
    assert_eq!(
        upsilon_of_projection(&p, 2, 2, &cfg()).unwrap_err(),
        CapacityError::Solver(SolveStatus::DualInfeasible)
    );
}

#[test]
fn certificate_embeds_with_zero_residual() {
    let pairs = [(0, 0), (1, 1), (0, 1), (1, 0)];
    for k in 1..=4 {
        let p = maximally_entangled_projection(2, &pairs[..k]);
        let reduced = build_from_projection(p.clone(), 2, 2).unwrap();
        let (s, u) = maximally_entangled_certificate(&p, 2);
        let report = verify_primal(&reduced.problem, &reduced.embed(&s, &u));
        assert!(report.max_equality_residual <= 1e-12, "k={k}: {}", report.max_equality_residual);
        assert!(report.min_eigenvalue() >= -1e-12);
        assert!((report.objective + 4.0 / k as f64).abs() <= 1e-12);
        assert!(check_point(&p, &s, &u, 2, 2, 4.0 / k as f64).passes(1e-12));
    }
}

#[test]
fn pauli_k2_certificate_is_feasible_for_channel_problem() {
    let reduced = build_sdp(&choi(&pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap()), 1e-9).unwrap();
    let (s, u) = maximally_entangled_certificate(&reduced.projection, 2);
    let report = verify_primal(&reduced.problem, &reduced.embed(&s, &u));
    assert!(report.is_feasible(1e-12));
    assert!((report.objective + 2.0).abs() <= 1e-12);
}

#[test]
fn message_counts() {
    let c = cfg();
    assert_eq!(m0_qns(&pauli_channel([0.5, 0.25, 0.25, 0.0]).unwrap(), &c).unwrap().count, 1);
    assert_eq!(m0_qns(&Channel::identity(2), &c).unwrap().count, 4);
    let m = m0_qns(&extremal_channel(0.7, 0.3), &c).unwrap();
    assert_eq!(m.count, 1);
    assert!(m.certified);
}

#[test]
fn snapping_rule() {
    assert_eq!(snap_floor(1.9999995), 2);
    assert_eq!(snap_floor(1.999), 1);
    assert_eq!(snap_floor(4.0 / 3.0), 1);
    assert_eq!(snap_floor(0.9999999), 1);
    assert_eq!(snap_floor(2.0000004), 2);
}

#[test]
fn pauli_closed_forms() {
    assert_eq!(pauli_upsilon_analytic(3, 2).unwrap(), Rational64::new(4, 3));
    assert_eq!(pauli_upsilon_analytic(1, 2).unwrap(), Rational64::from_integer(4));
    assert_eq!(pauli_upsilon_analytic(9, 3).unwrap(), Rational64::from_integer(1));
    assert!(pauli_upsilon_analytic(0, 2).is_err());
    assert!(pauli_upsilon_analytic(5, 2).is_err());
    assert!((c0_qns_pauli(3, 2).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-15);
    assert!((c0_qns_pauli(3, 2).unwrap() - 0.4150).abs() < 1e-4);
    assert_eq!(c0_qns_pauli(4, 2).unwrap(), 0.0);
    assert_eq!(c0_qns_pauli(1, 2).unwrap(), 2.0);
}

#[test]
fn uniform_qutrit_pauli_is_one() {
    let ch = generalized_pauli_channel(3, &[1.0 / 9.0; 9]).unwrap();
    assert_upsilon(&ch, 1.0, 1e-6);
}

#[test]
fn graph_formula_examples() {
    let two = m0_qns_via_graph(&pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap()).unwrap();
    assert_eq!(two, Rational64::from_integer(2));
    assert_eq!(m0_qns_via_graph(&amplitude_damping(0.4).unwrap()).unwrap(), Rational64::from_integer(1));
    let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).scale(0.5f64.sqrt());
    assert_eq!(m0_qns_via_graph(&Channel::unitary(h).unwrap()).unwrap(), Rational64::from_integer(4));
    assert!(matches!(
        m0_qns_via_graph(&Channel::identity(3)),
        Err(CapacityError::NotQubit { .. })
    ));
}

#[test]
fn finite_copy_samples() {
    let c = cfg();
    let dephasing = pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap();
    let two = c0_qns_finite_n(&dephasing, 2, &c).unwrap();
    assert!(two.upsilon.certified);
    assert!((two.bits - 1.0).abs() <= 1e-5, "{}", two.bits);
    let ad = amplitude_damping(0.3).unwrap();
    let one = c0_qns_finite_n(&ad, 1, &c).unwrap();
    assert!((one.bits - upsilon(&ad, &c).unwrap().value.log2()).abs() < 1e-12);
    assert!(matches!(
        c0_qns_finite_n(&dephasing, 5, &c),
        Err(CapacityError::SizeCap { side: 1024, cap: 256 })
    ));
    assert!(c0_qns_finite_n(&dephasing, 0, &c).is_err());
}

#[test]
fn reports() {
    let c = cfg();
    let r = full_report(&pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap(), &c, &[1]).unwrap();
    assert!((r.upsilon - 2.0).abs() < 1e-6);
    assert_eq!((r.m0_qns, r.dim_s, r.m0_se), (2, 2, Some(2)));
    assert_eq!(r.c0_se_bits, Some(1.0));
    assert!(r.unital && r.certified && r.discrepancies.is_empty());

    let r = full_report(&pauli_channel([0.5, 0.25, 0.25, 0.0]).unwrap(), &c, &[1]).unwrap();
    assert!((r.upsilon - 4.0 / 3.0).abs() < 1e-6);
    assert_eq!((r.m0_qns, r.dim_s, r.m0_se), (1, 4, Some(1)));
    assert_eq!(r.c0_se_bits, Some(0.0));
    assert!((r.c0_qns_finite_n[0].1 - (4.0f64 / 3.0).log2()).abs() < 1e-6);

    let r = full_report(&extremal_channel(0.7, 0.3), &c, &[1]).unwrap();
    assert!((r.upsilon - 1.0).abs() < 1e-6);
    assert_eq!((r.m0_qns, r.dim_s, r.m0_se), (1, 4, Some(1)));
    assert!(!r.unital && r.certified && r.discrepancies.is_empty());

    let r = full_report(&Channel::identity(3), &c, &[1]).unwrap();
    assert!((r.upsilon - 9.0).abs() < 1e-6);
    assert_eq!((r.m0_se, r.m0_qns_via_graph, r.dim_s), (None, None, 1));
}

#[test]
fn three_qubit_copies_exceed_the_dense_limit() {
    let dephasing = pauli_channel([0.5, 0.5, 0.0, 0.0]).unwrap();
    assert!(matches!(
        c0_qns_finite_n(&dephasing, 3, &cfg()),
        Err(CapacityError::Sdp(SdpError::TooLarge { rows: 4096, .. }))
    ));
}
