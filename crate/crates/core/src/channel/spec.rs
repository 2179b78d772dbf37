//! JSON channel descriptions.
//!
//! ```json
//! {"type": "pauli", "probs": [0.5, 0.5, 0, 0]}
//! {"type": "generalized_pauli", "d": 3, "probs": [[1,0,0],[0,0,0],[0,0,0]]}
//! {"type": "extremal", "theta": 0.7, "phi": 0.3}
//! {"type": "kraus", "operators": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}
//! {"type": "choi", "dim_in": 2, "dim_out": 2, "matrix": [[[1,0], ...], ...]}
//! ```
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use super::{
    extremal_channel, generalized_pauli_channel, kraus_from_choi, pauli_channel, Channel,
    ChannelError, ChoiMatrix, SIMPLEX_TOL,
};
use crate::linalg::{ComplexMatrix, DEFAULT_RANK_TOL};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unknown channel type {0:?}")]
    UnknownType(String),
    #[error("probability simplex violated: {0}")]
    Simplex(String),
    #[error("matrix shape error: {0}")]
    Shape(String),
    #[error("invalid channel: {0}")]
    Channel(#[from] ChannelError),
}

/// Parsed, structurally validated channel description.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Kraus(Vec<ComplexMatrix>),
    Choi {
        matrix: ComplexMatrix,
        dim_in: usize,
        dim_out: usize,
    },
    Pauli([f64; 4]),
    GeneralizedPauli { d: usize, probs: Vec<f64> },
    /// Accepted for every angle pair; see [`ChannelSpec::is_nonunital_extremal`].
    Extremal { theta: f64, phi: f64 },
}

impl ChannelSpec {
    /// For extremal specs, whether `cos²θ ≠ cos²φ`; `None` for other families.
    pub fn is_nonunital_extremal(&self) -> Option<bool> {
        match self {
            ChannelSpec::Extremal { theta, phi } => {
                Some((theta.cos().powi(2) - phi.cos().powi(2)).abs() > 1e-12)
            }
            _ => None,
        }
    }
}

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausRaw {
    #[serde(rename = "type")]
    _type: String,
    operators: Vec<RawMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiRaw {
    #[serde(rename = "type")]
    _type: String,
    matrix: RawMatrix,
    dim_in: Option<usize>,
    dim_out: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PauliRaw {
    #[serde(rename = "type")]
    _type: String,
    probs: [f64; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralizedPauliRaw {
    #[serde(rename = "type")]
    _type: String,
    d: usize,
    probs: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtremalRaw {
    #[serde(rename = "type")]
    _type: String,
    theta: f64,
    phi: f64,
}

fn matrix_from_raw(raw: &RawMatrix) -> Result<ComplexMatrix, SpecError> {
    let rows: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|row| row.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        .collect();
    if rows.is_empty() || rows[0].is_empty() {
        return Err(SpecError::Shape("empty matrix".into()));
    }
    ComplexMatrix::from_rows(&rows).map_err(|e| SpecError::Shape(e.to_string()))
}

fn simplex(probs: &[f64]) -> Result<(), SpecError> {
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(SpecError::Simplex(format!("negative or non-finite entry {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(SpecError::Simplex(format!("entries sum to {total}")));
    }
    Ok(())
}

fn from_value<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, SpecError> {
    serde_json::from_value(value).map_err(|e| SpecError::Json(e.to_string()))
}

pub fn parse_channel_spec(text: &[u8]) -> Result<ChannelSpec, SpecError> {
    let value: Value = serde_json::from_slice(text).map_err(|e| SpecError::Json(e.to_string()))?;
    let tag = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| SpecError::Json("missing string field \"type\"".into()))?
        .to_owned();
    match tag.as_str() {
        "kraus" => {
            let raw: KrausRaw = from_value(value)?;
            if raw.operators.is_empty() {
                return Err(SpecError::Shape("empty Kraus list".into()));
            }
            let ops = raw
                .operators
                .iter()
                .map(matrix_from_raw)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ChannelSpec::Kraus(ops))
        }
        "choi" => {
            let raw: ChoiRaw = from_value(value)?;
            let matrix = matrix_from_raw(&raw.matrix)?;
            if !matrix.is_square() {
                return Err(SpecError::Shape(format!(
                    "Choi matrix is {}x{}",
                    matrix.rows(),
                    matrix.cols()
                )));
            }
            let n = matrix.rows();
            let (dim_in, dim_out) = match (raw.dim_in, raw.dim_out) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) if a > 0 && n % a == 0 => (a, n / a),
                (None, Some(b)) if b > 0 && n % b == 0 => (n / b, b),
                (None, None) => {
                    let d = (n as f64).sqrt().round() as usize;
                    if d * d != n {
                        return Err(SpecError::Shape(format!(
                            "side {n} is not a perfect square; give dim_in/dim_out"
                        )));
                    }
                    (d, d)
                }
                _ => return Err(SpecError::Shape("dim_in/dim_out do not divide the side".into())),
            };
            if dim_in * dim_out != n {
                return Err(SpecError::Shape(format!("{dim_in}·{dim_out} ≠ side {n}")));
            }
            Ok(ChannelSpec::Choi {
                matrix,
                dim_in,
                dim_out,
            })
        }
        "pauli" => {
            let raw: PauliRaw = from_value(value)?;
            simplex(&raw.probs)?;
            Ok(ChannelSpec::Pauli(raw.probs))
        }
        "generalized_pauli" => {
            let raw: GeneralizedPauliRaw = from_value(value)?;
            if raw.d < 2 || raw.probs.len() != raw.d || raw.probs.iter().any(|r| r.len() != raw.d) {
                return Err(SpecError::Shape(format!("probs must be a {0}x{0} array with d >= 2", raw.d)));
            }
            let probs: Vec<f64> = raw.probs.into_iter().flatten().collect();
            simplex(&probs)?;
            Ok(ChannelSpec::GeneralizedPauli { d: raw.d, probs })
        }
        "extremal" => {
            let raw: ExtremalRaw = from_value(value)?;
            if !raw.theta.is_finite() || !raw.phi.is_finite() {
                return Err(SpecError::Json("angles must be finite".into()));
            }
            Ok(ChannelSpec::Extremal {
                theta: raw.theta,
                phi: raw.phi,
            })
        }
        other => Err(SpecError::UnknownType(other.to_owned())),
    }
}

pub fn realize(spec: &ChannelSpec) -> Result<Channel, SpecError> {
    Ok(match spec {
        ChannelSpec::Kraus(ops) => Channel::from_kraus(ops.clone())?,
        ChannelSpec::Choi {
            matrix,
            dim_in,
            dim_out,
        } => kraus_from_choi(&ChoiMatrix::new(matrix.clone(), *dim_in, *dim_out)?, DEFAULT_RANK_TOL)?,
        ChannelSpec::Pauli(p) => pauli_channel(*p)?,
        ChannelSpec::GeneralizedPauli { d, probs } => generalized_pauli_channel(*d, probs)?,
        ChannelSpec::Extremal { theta, phi } => extremal_channel(*theta, *phi),
    })
}
