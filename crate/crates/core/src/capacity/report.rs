use std::fmt;

use num_rational::Rational64;

use super::{c0_qns_finite_n, m0_qns_via_graph, snap_floor, upsilon, CapacityError, INTEGER_SNAP_TOL};
use crate::channel::{choi, is_unital, Channel};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::ncgraph::{mse_qubit, noncommutative_graph_dim};
use crate::sdp::SolverConfig;

/// Tolerance on `Σ EᵢEᵢ† = I` used to label a channel unital.
pub const UNITAL_TOL: f64 = 1e-9;

/// A cross-identity that failed on a computed report.
#[derive(Debug, Clone, PartialEq)]
pub enum Discrepancy {
    /// `M₀^QNS ≠ 4/dim S` for a qubit channel.
    GraphFormula { m0_qns: u64, via_graph: Rational64 },
    /// `M₀^SE ≠ M₀^QNS` for a qubit channel.
    EntanglementAssisted { m0_se: u32, m0_qns: u64 },
    /// Nonunital qubit channel with `Υ ≠ 1`.
    NonunitalCollapse { upsilon: f64 },
    /// `Υ < 1`, below the value of the always-feasible point.
    FeasibilityFloor { upsilon: f64 },
    /// `Υ > 4` for a qubit channel.
    QubitCeiling { upsilon: f64 },
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GraphFormula { m0_qns, via_graph } => {
                write!(f, "m0_qns = {m0_qns} but 4/dim_s = {via_graph}")
            }
            Self::EntanglementAssisted { m0_se, m0_qns } => {
                write!(f, "m0_se = {m0_se} but m0_qns = {m0_qns}")
            }
            Self::NonunitalCollapse { upsilon } => write!(f, "nonunital qubit channel with upsilon = {upsilon}"),
            Self::FeasibilityFloor { upsilon } => write!(f, "upsilon = {upsilon} below 1"),
            Self::QubitCeiling { upsilon } => write!(f, "qubit channel with upsilon = {upsilon} above 4"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub upsilon: f64,
    pub m0_qns: u64,
    pub dim_s: usize,
    /// `4/dim S`; qubit channels only.
    pub m0_qns_via_graph: Option<Rational64>,
    /// Qubit channels only.
    pub m0_se: Option<u32>,
    pub c0_se_bits: Option<f64>,
    /// `(n, (1/n) log₂ Υ(N^{⊗n}))`.
    pub c0_qns_finite_n: Vec<(usize, f64)>,
    pub unital: bool,
    pub choi_rank: usize,
    /// Every solve behind the report was certified.
    pub certified: bool,
    /// Relative duality gap of the single-copy solve.
    pub gap: f64,
    pub discrepancies: Vec<Discrepancy>,
}

/// Υ, `M₀^QNS`, the noncommutative graph quantities and finite-copy samples
/// for each `n` in `n_list`.
pub fn full_report(ch: &Channel, cfg: &SolverConfig, n_list: &[usize]) -> Result<CapacityReport, CapacityError> {
    let single = upsilon(ch, cfg)?;
    let m0_qns = snap_floor(single.value);
    let dim_s = noncommutative_graph_dim(ch, DEFAULT_RANK_TOL)?;
    let unital = ch.dim_in() == ch.dim_out() && is_unital(ch, UNITAL_TOL)?;
    let choi_rank = choi(ch).rank(DEFAULT_RANK_TOL);

    let mut certified = single.certified;
    let mut samples = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let bits = if n == 1 {
            single.value.log2()
        } else {
            let sample = c0_qns_finite_n(ch, n, cfg)?;
            certified &= sample.upsilon.certified;
            sample.bits
        };
        samples.push((n, bits));
    }

    let mut discrepancies = Vec::new();
    if single.value < 1.0 - INTEGER_SNAP_TOL {
        discrepancies.push(Discrepancy::FeasibilityFloor { upsilon: single.value });
    }
    let (m0_qns_via_graph, m0_se, c0_se_bits) = if ch.is_qubit() {
        let via_graph = m0_qns_via_graph(ch)?;
        let m0_se = mse_qubit(dim_s)?;
        if via_graph != Rational64::from_integer(m0_qns as i64) {
            discrepancies.push(Discrepancy::GraphFormula { m0_qns, via_graph });
        }
        if u64::from(m0_se) != m0_qns {
            discrepancies.push(Discrepancy::EntanglementAssisted { m0_se, m0_qns });
        }
        if !unital && (single.value - 1.0).abs() > INTEGER_SNAP_TOL {
            discrepancies.push(Discrepancy::NonunitalCollapse { upsilon: single.value });
        }
        if single.value > 4.0 + INTEGER_SNAP_TOL {
            discrepancies.push(Discrepancy::QubitCeiling { upsilon: single.value });
        }
        (Some(via_graph), Some(m0_se), Some(f64::from(m0_se).log2()))
    } else {
        (None, None, None)
    };

    Ok(CapacityReport {
        upsilon: single.value,
        m0_qns,
        dim_s,
        m0_qns_via_graph,
        m0_se,
        c0_se_bits,
        c0_qns_finite_n: samples,
        unital,
        choi_rank,
        certified,
        gap: single.gap(),
        discrepancies,
    })
}
