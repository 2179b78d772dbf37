// Channels described as JSON, the same format `qnscap compute` reads.

use std::error::Error;

use qns_capacity::capacity::full_report;
use qns_capacity::channel::{parse_channel_spec, realize};
use qns_capacity::cli::ReportJson;
use qns_capacity::sdp::SolverConfig;

const SPECS: [&str; 4] = [
    r#"{"type": "pauli", "probs": [0.5, 0.5, 0, 0]}"#,
    r#"{"type": "extremal", "theta": 0.7, "phi": 0.3}"#,
    r#"{"type": "generalized_pauli", "d": 3, "probs": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0]]}"#,
    r#"{"type": "kraus", "operators": [
        [[[0.8, 0], [0, 0]], [[0, 0], [0.8, 0]]],
        [[[0, 0], [0.6, 0]], [[0.6, 0], [0, 0]]]
    ]}"#,
];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    for text in SPECS {
        let spec = parse_channel_spec(text.as_bytes())?;
        let ch = realize(&spec)?;
        let report = full_report(&ch, &cfg, &[1])?;
        println!("{}", serde_json::to_string(&ReportJson::from_report(&report))?);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
