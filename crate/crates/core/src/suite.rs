//! Verification suite: every closed-form identity checked against the SDP on
//! seeded random populations. Shared by `qnscap verify` and the acceptance
//! tests.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{
    build_from_projection, check_point, full_report, maximally_entangled_certificate,
    maximally_entangled_projection, snap_floor, upsilon, upsilon_of_projection, c0_qns_finite_n, CapacityError,
    UpsilonResult,
};
use crate::channel::random::{
    random_channel, random_density_matrix, random_nonunital_qubit_channel, random_probabilities, random_unitary,
};
use crate::channel::{
    amplitude_damping, choi, extremal_channel, generalized_pauli_channel, kraus_from_choi, pauli_channel, tensor,
    Channel,
};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::ncgraph::{mse_qubit, noncommutative_graph_dim};
use crate::sdp::{verify_primal, SolveStatus, SolverConfig};

pub const DEFAULT_SEED: u64 = 7;

/// One line of the verification table.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub id: String,
    pub name: String,
    pub measured: String,
    pub expected: String,
    pub tolerance: String,
    pub pass: bool,
}

/// Certification data of one solve, collected for the certification row.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub label: String,
    pub optimal: bool,
    pub certified: bool,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

impl SolveRecord {
    fn from_result(label: String, r: &UpsilonResult) -> Self {
        Self {
            label,
            optimal: r.status == SolveStatus::Optimal,
            certified: r.certified,
            gap: r.certification.gap,
            primal_residual: r.certification.primal.max_equality_residual,
            dual_residual: r.certification.dual_residual,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub rows: Vec<CheckRow>,
    pub solves: Vec<SolveRecord>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Per-criterion generator, independent of the order criteria run in.
pub fn criterion_rng(seed: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(criterion.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Solves in parallel; results come back in input order.
fn solve_all(channels: &[Channel], cfg: &SolverConfig) -> Vec<Result<UpsilonResult, CapacityError>> {
    channels.par_iter().map(|ch| upsilon(ch, cfg)).collect()
}

fn row(id: &str, name: &str, measured: String, expected: String, tolerance: String, pass: bool) -> CheckRow {
    CheckRow {
        id: id.into(),
        name: name.into(),
        measured,
        expected,
        tolerance,
        pass,
    }
}

/// Worst `|Υ − expected|` over a population; any error or uncertified
/// result fails the row.
struct Deviation {
    worst: f64,
    failures: usize,
    count: usize,
}

impl Deviation {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: 0,
            count: 0,
        }
    }

    fn add(
        &mut self,
        label: String,
        r: &Result<UpsilonResult, CapacityError>,
        expected: f64,
        solves: &mut Vec<SolveRecord>,
    ) -> Option<f64> {
        self.count += 1;
        match r {
            Ok(r) => {
                solves.push(SolveRecord::from_result(label, r));
                if !r.certified {
                    self.failures += 1;
                }
                let d = (r.value - expected).abs();
                self.worst = self.worst.max(d);
                Some(r.value)
            }
            Err(_) => {
                self.failures += 1;
                self.worst = f64::INFINITY;
                None
            }
        }
    }

    fn passes(&self, tol: f64) -> bool {
        self.failures == 0 && self.worst <= tol
    }

    fn measured(&self) -> String {
        let mut s = format!("max dev {:.2e} over {}", self.worst, self.count);
        if self.failures > 0 {
            s.push_str(&format!(", {} uncertified", self.failures));
        }
        s
    }
}

/// Pauli channels over all 15 support patterns, 10 draws each.
pub fn pauli_closed_form(seed: u64, cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 1);
    let mut cases = Vec::new();
    for mask in 1u64..16 {
        for _ in 0..10 {
            let p = random_probabilities(&mut rng, 4, mask);
            cases.push((mask.count_ones(), pauli_channel([p[0], p[1], p[2], p[3]]).expect("valid simplex point")));
        }
    }
    let channels: Vec<Channel> = cases.iter().map(|(_, c)| c.clone()).collect();
    let results = solve_all(&channels, cfg);
    let mut dev = Deviation::new();
    for (i, ((k, _), r)) in cases.iter().zip(&results).enumerate() {
        dev.add(format!("pauli #{i}"), r, 4.0 / f64::from(*k), solves);
    }
    vec![row("1", "Pauli Υ = 4/k", dev.measured(), "4/k".into(), "1e-6".into(), dev.passes(1e-6))]
}

/// Sums of `k` Bell projectors and the analytic certificate.
pub fn bell_projections(cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut dev = Deviation::new();
    let mut residual: f64 = 0.0;
    for k in 1..=4 {
        let p = maximally_entangled_projection(2, &pairs[..k]);
        let r = upsilon_of_projection(&p, 2, 2, cfg);
        dev.add(format!("bell k={k}"), &r, 4.0 / k as f64, solves);
        match build_from_projection(p.clone(), 2, 2) {
            Ok(reduced) => {
                let (s, u) = maximally_entangled_certificate(&p, 2);
                let report = verify_primal(&reduced.problem, &reduced.embed(&s, &u));
                let objective_err = (report.objective + 4.0 / k as f64).abs();
                let point = check_point(&p, &s, &u, 2, 2, 4.0 / k as f64);
                residual = residual
                    .max(report.max_equality_residual)
                    .max(-report.min_eigenvalue())
                    .max(objective_err)
                    .max(point.max_violation());
            }
            Err(_) => residual = f64::INFINITY,
        }
    }
    vec![
        row("2", "Bell sums Υ = 4/k", dev.measured(), "4/k".into(), "1e-6".into(), dev.passes(1e-6)),
        row(
            "2.1",
            "Certificate ((2/k)I, (2/k)P) residual",
            format!("{residual:.2e}"),
            "0".into(),
            "1e-12".into(),
            residual <= 1e-12,
        ),
    ]
}

/// Amplitude damping, random extremal and random nonunital channels.
pub fn nonunital_collapse(seed: u64, cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 3);
    let mut channels: Vec<(String, Channel)> = (1..=9)
        .map(|g| {
            let gamma = f64::from(g) / 10.0;
            (format!("amplitude damping {gamma}"), amplitude_damping(gamma).expect("gamma in [0, 1]"))
        })
        .collect();
    let mut extremal = 0;
    while extremal < 20 {
        let theta = rng.random_range(0.0..FRAC_PI_2);
        let phi = rng.random_range(0.0..FRAC_PI_2);
        if (theta.cos().powi(2) - phi.cos().powi(2)).abs() < 0.05 {
            continue;
        }
        channels.push((format!("extremal {theta:.4} {phi:.4}"), extremal_channel(theta, phi)));
        extremal += 1;
    }
    for i in 0..100 {
        let env = 2 + i % 3;
        channels.push((format!("nonunital #{i}"), random_nonunital_qubit_channel(&mut rng, env)));
    }
    let plain: Vec<Channel> = channels.iter().map(|(_, c)| c.clone()).collect();
    let results = solve_all(&plain, cfg);
    let mut dev = Deviation::new();
    for ((label, _), r) in channels.iter().zip(&results) {
        dev.add(label.clone(), r, 1.0, solves);
    }
    vec![row("3", "Nonunital Υ = 1", dev.measured(), "1".into(), "1e-6".into(), dev.passes(1e-6))]
}

/// Criteria 4 and 5 on 100 random qubit channels of each Choi rank 1–4.
pub fn graph_formula(seed: u64, cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 4);
    let channels: Vec<Channel> = (1..=4)
        .flat_map(|rank| (0..100).map(move |_| rank))
        .map(|rank| random_channel(&mut rng, 2, 2, rank))
        .collect();
    let results = solve_all(&channels, cfg);
    let mut graph_mismatch = 0;
    let mut se_mismatch = 0;
    let mut bad_dims = 0;
    let mut uncertified = 0;
    let mut dims_seen = [0usize; 5];
    for (i, (ch, r)) in channels.iter().zip(&results).enumerate() {
        let dim = noncommutative_graph_dim(ch, DEFAULT_RANK_TOL).unwrap_or(0);
        if !matches!(dim, 1 | 2 | 4) {
            bad_dims += 1;
        }
        dims_seen[dim.min(4)] += 1;
        let m0 = match r {
            Ok(r) => {
                solves.push(SolveRecord::from_result(format!("rank-{} #{i}", i / 100 + 1), r));
                if !r.certified {
                    uncertified += 1;
                }
                snap_floor(r.value)
            }
            Err(_) => {
                uncertified += 1;
                0
            }
        };
        // 4/dim S is an integer exactly when dim S divides 4.
        if dim == 0 || 4 % dim != 0 || m0 != (4 / dim) as u64 {
            graph_mismatch += 1;
        }
        if mse_qubit(dim).map_or(true, |se| u64::from(se) != m0) {
            se_mismatch += 1;
        }
    }
    let dims = format!("dim S counts 1:{} 2:{} 3:{} 4:{}", dims_seen[1], dims_seen[2], dims_seen[3], dims_seen[4]);
    let table: Vec<u32> = (1..=4).map(|d| mse_qubit(d).unwrap_or(0)).collect();
    let table_str = table.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    vec![
        row(
            "4",
            "M₀^QNS = 4/dim S (400 channels)",
            format!("{graph_mismatch} mismatches, {bad_dims} bad dims, {uncertified} uncertified; {dims}"),
            "0 mismatches".into(),
            "exact".into(),
            graph_mismatch == 0 && bad_dims == 0 && uncertified == 0,
        ),
        row(
            "5",
            "M₀^SE = M₀^QNS (400 channels)",
            format!("{se_mismatch} mismatches"),
            "0 mismatches".into(),
            "exact".into(),
            se_mismatch == 0 && uncertified == 0,
        ),
        row("5.1", "M₀^SE table", table_str.clone(), "4,2,2,1".into(), "exact".into(), table_str == "4,2,2,1"),
    ]
}

/// `Υ(N₁⊗N₂) = Υ(N₁)Υ(N₂)` for random Pauli pairs.
pub fn pauli_additivity(seed: u64, cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 6);
    let draw = |rng: &mut ChaCha8Rng| {
        let mask = rng.random_range(1u64..16);
        let p = random_probabilities(rng, 4, mask);
        pauli_channel([p[0], p[1], p[2], p[3]]).expect("valid simplex point")
    };
    let pairs: Vec<(Channel, Channel)> = (0..5).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
    let outcomes: Vec<_> = pairs
        .par_iter()
        .map(|(a, b)| (upsilon(a, cfg), upsilon(b, cfg), upsilon(&tensor(a, b), cfg)))
        .collect();
    let mut dev = Deviation::new();
    for (i, (a, b, ab)) in outcomes.iter().enumerate() {
        let product = match (a, b) {
            (Ok(a), Ok(b)) => {
                solves.push(SolveRecord::from_result(format!("pair {i} first"), a));
                solves.push(SolveRecord::from_result(format!("pair {i} second"), b));
                if !(a.certified && b.certified) {
                    dev.failures += 1;
                }
                a.value * b.value
            }
            _ => {
                dev.failures += 1;
                f64::NAN
            }
        };
        dev.add(format!("pair {i} product"), ab, product, solves);
        if product.is_nan() {
            dev.worst = f64::INFINITY;
        }
    }
    vec![row(
        "6",
        "Pauli Υ(N₁⊗N₂) = Υ(N₁)Υ(N₂)",
        dev.measured(),
        "Υ(N₁)Υ(N₂)".into(),
        "1e-5".into(),
        dev.passes(1e-5),
    )]
}

/// Pauli `(1/2, 1/4, 1/4, 0)`: `M₀^QNS = 1`, `C₀^SE = 0`, one-copy rate `log₂(4/3)`.
pub fn separation_example(cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let ch = pauli_channel([0.5, 0.25, 0.25, 0.0]).expect("valid simplex point");
    let expected_rate = (4.0f64 / 3.0).log2();
    match (full_report(&ch, cfg, &[1]), upsilon(&ch, cfg)) {
        (Ok(rep), Ok(single)) => {
            solves.push(SolveRecord::from_result("pauli k=3".into(), &single));
            let rate = rep.c0_qns_finite_n.first().map_or(f64::NAN, |&(_, v)| v);
            let rate_err = (rate - expected_rate).abs();
            let pass = rep.certified
                && rep.m0_qns == 1
                && rep.c0_se_bits == Some(0.0)
                && rate_err <= 1e-6
                && rep.discrepancies.is_empty();
            vec![
                row(
                    "7",
                    "Pauli k=3 separation",
                    format!(
                        "M₀^QNS={} C₀^SE={} C₀^QNS(n=1)={rate:.9}",
                        rep.m0_qns,
                        rep.c0_se_bits.map_or("-".into(), |v| v.to_string())
                    ),
                    format!("M₀^QNS=1 C₀^SE=0 C₀^QNS(n=1)={expected_rate:.9}"),
                    "1e-6".into(),
                    pass,
                ),
                row(
                    "7.1",
                    "Pauli k=3 Υ",
                    format!("{:.6}", rep.upsilon),
                    format!("{:.6}", 4.0 / 3.0),
                    "1e-6".into(),
                    (rep.upsilon - 4.0 / 3.0).abs() <= 1e-6 && rep.certified,
                ),
            ]
        }
        (Err(e), _) | (_, Err(e)) => vec![row(
            "7",
            "Pauli k=3 separation",
            format!("error: {e}"),
            "M₀^QNS=1 C₀^SE=0".into(),
            "1e-6".into(),
            false,
        )],
    }
}

/// Qutrit generalized Pauli channels with `k ∈ {1, 2, 3}`.
pub fn qutrit_pauli(seed: u64, cfg: &SolverConfig, solves: &mut Vec<SolveRecord>) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 8);
    let mut cases = Vec::new();
    for k in 1..=3u32 {
        let mut mask = 0u64;
        while mask.count_ones() < k {
            mask |= 1 << rng.random_range(0..9);
        }
        let p = random_probabilities(&mut rng, 9, mask);
        cases.push((k, generalized_pauli_channel(3, &p).expect("valid simplex point")));
    }
    let channels: Vec<Channel> = cases.iter().map(|(_, c)| c.clone()).collect();
    let results = solve_all(&channels, cfg);
    let mut dev = Deviation::new();
    for ((k, _), r) in cases.iter().zip(&results) {
        dev.add(format!("qutrit k={k}"), r, 9.0 / f64::from(*k), solves);
    }
    vec![row("8", "Qutrit Pauli Υ = 9/k", dev.measured(), "9/k".into(), "1e-5".into(), dev.passes(1e-5))]
}

/// Every solve collected so far: Optimal, gap and residuals within 1e-8.
pub fn certification_row(solves: &[SolveRecord]) -> CheckRow {
    let worst = |f: fn(&SolveRecord) -> f64| solves.iter().map(f).fold(0.0, f64::max);
    let gap = worst(|s| s.gap);
    let pres = worst(|s| s.primal_residual);
    let dres = worst(|s| s.dual_residual);
    let failed = solves.iter().filter(|s| !(s.optimal && s.certified)).count();
    row(
        "9",
        "Solver certification",
        format!(
            "{} solves, {failed} uncertified, max gap {gap:.2e}, primal {pres:.2e}, dual {dres:.2e}",
            solves.len()
        ),
        "all certified".into(),
        "1e-8".into(),
        failed == 0 && gap <= 1e-8 && pres <= 1e-8 && dres <= 1e-8 && !solves.is_empty(),
    )
}

/// Feasibility floor, local-unitary invariance and the Choi/Kraus round trip.
pub fn property_suite(seed: u64, cfg: &SolverConfig) -> Vec<CheckRow> {
    let mut rng = criterion_rng(seed, 10);
    let dims: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let floor_channels: Vec<Channel> = (0..100)
        .map(|i| {
            let (a, b) = dims[i % dims.len()];
            let env = (1 + (i / dims.len()) % 4).max(a.div_ceil(b));
            random_channel(&mut rng, a, b, env)
        })
        .collect();
    let floor = solve_all(&floor_channels, cfg);
    let mut floor_min = f64::INFINITY;
    let mut floor_failures = 0;
    for r in &floor {
        match r {
            Ok(r) if r.certified => floor_min = floor_min.min(r.value),
            _ => floor_failures += 1,
        }
    }

    let triples: Vec<(Channel, Channel)> = (0..20)
        .map(|i| {
            let ch = random_channel(&mut rng, 2, 2, 1 + i % 4);
            let u = random_unitary(&mut rng, 2);
            let v = random_unitary(&mut rng, 2);
            let rotated = ch.conjugated(&v, &u).expect("unitaries preserve trace");
            (ch, rotated)
        })
        .collect();
    let invariance: Vec<_> = triples
        .par_iter()
        .map(|(a, b)| (upsilon(a, cfg), upsilon(b, cfg)))
        .collect();
    let mut lu_worst: f64 = 0.0;
    let mut lu_failures = 0;
    for (a, b) in &invariance {
        match (a, b) {
            (Ok(a), Ok(b)) if a.certified && b.certified => lu_worst = lu_worst.max((a.value - b.value).abs()),
            _ => lu_failures += 1,
        }
    }

    let mut roundtrip_worst: f64 = 0.0;
    for i in 0..50 {
        let d = 2 + i % 2;
        let ch = random_channel(&mut rng, d, d, 1 + i % (d * d));
        let j = choi(&ch);
        let err = match kraus_from_choi(&j, DEFAULT_RANK_TOL) {
            Ok(back) => {
                let chan_err = (choi(&back).matrix() - j.matrix()).frobenius_norm();
                // Action on a random state as a second, Choi-free comparison.
                let rho = random_density_matrix(&mut rng, d);
                chan_err.max((&back.apply(&rho) - &ch.apply(&rho)).frobenius_norm())
            }
            Err(_) => f64::INFINITY,
        };
        roundtrip_worst = roundtrip_worst.max(err);
    }

    vec![
        row(
            "10.1",
            "Feasibility floor Υ ≥ 1",
            format!("min Υ {floor_min:.9} over 100, {floor_failures} uncertified"),
            "≥ 1".into(),
            "1e-6".into(),
            floor_failures == 0 && floor_min >= 1.0 - 1e-6,
        ),
        row(
            "10.2",
            "Local-unitary invariance",
            format!("max dev {lu_worst:.2e} over 20, {lu_failures} uncertified"),
            "0".into(),
            "1e-6".into(),
            lu_failures == 0 && lu_worst <= 1e-6,
        ),
        row(
            "10.3",
            "Choi/Kraus round trip",
            format!("max err {roundtrip_worst:.2e} over 50"),
            "0".into(),
            "1e-8".into(),
            roundtrip_worst <= 1e-8,
        ),
    ]
}

/// Two copies of the extremal channel `θ = 0.7, φ = 0.3`. No reference
/// value exists; the row passes when the solve is certified.
pub fn extremal_two_copies(cfg: &SolverConfig) -> CheckRow {
    let ch = extremal_channel(0.7, 0.3);
    match c0_qns_finite_n(&ch, 2, cfg) {
        Ok(s) => row(
            "X",
            "Extremal θ=0.7 φ=0.3, n=2 (exploratory)",
            format!("Υ = {:.9}, rate {:.9} bits, gap {:.2e}", s.upsilon.value, s.bits, s.upsilon.gap()),
            "certified".into(),
            "1e-8".into(),
            s.upsilon.certified,
        ),
        Err(e) => row(
            "X",
            "Extremal θ=0.7 φ=0.3, n=2 (exploratory)",
            format!("error: {e}"),
            "certified".into(),
            "1e-8".into(),
            false,
        ),
    }
}

/// Runs every criterion in order.
pub fn run_suite(seed: u64, cfg: &SolverConfig) -> SuiteReport {
    let mut solves = Vec::new();
    let mut rows = Vec::new();
    rows.extend(pauli_closed_form(seed, cfg, &mut solves));
    rows.extend(bell_projections(cfg, &mut solves));
    rows.extend(nonunital_collapse(seed, cfg, &mut solves));
    rows.extend(graph_formula(seed, cfg, &mut solves));
    rows.extend(pauli_additivity(seed, cfg, &mut solves));
    rows.extend(separation_example(cfg, &mut solves));
    rows.extend(qutrit_pauli(seed, cfg, &mut solves));
    rows.push(certification_row(&solves));
    rows.extend(property_suite(seed, cfg));
    rows.push(extremal_two_copies(cfg));
    SuiteReport { seed, rows, solves }
}
