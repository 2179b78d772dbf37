// The noncommutative graph S = span{Eᵢ†Eⱼ} fixes the qubit message counts:
// M₀^QNS = 4/dim S and M₀^SE follows from the same dimension.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qns_capacity::capacity::{m0_qns, m0_qns_via_graph};
use qns_capacity::channel::random::random_channel;
use qns_capacity::channel::{amplitude_damping, pauli_channel, Channel};
use qns_capacity::linalg::DEFAULT_RANK_TOL;
use qns_capacity::ncgraph::{mse_qubit, noncommutative_graph_dim};
use qns_capacity::sdp::SolverConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut channels: Vec<(String, Channel)> = vec![
        ("identity".into(), Channel::identity(2)),
        ("dephasing".into(), pauli_channel([0.5, 0.5, 0.0, 0.0])?),
        ("pauli k=3".into(), pauli_channel([0.5, 0.25, 0.25, 0.0])?),
        ("amplitude damping 0.4".into(), amplitude_damping(0.4)?),
    ];
    for rank in 1..=4 {
        channels.push((format!("random rank {rank}"), random_channel(&mut rng, 2, 2, rank)));
    }
    println!("{:<24} {:>5} {:>10} {:>6} {:>6}", "channel", "dim S", "4/dim S", "M0 QNS", "M0 SE");
    for (name, ch) in &channels {
        let dim = noncommutative_graph_dim(ch, DEFAULT_RANK_TOL)?;
        let via_graph = m0_qns_via_graph(ch)?;
        let sdp = m0_qns(ch, &cfg)?;
        let se = mse_qubit(dim)?;
        if via_graph.to_integer() as u64 != sdp.count || u64::from(se) != sdp.count {
            return Err(format!("{name}: graph {via_graph}, SDP {}, SE {se}", sdp.count).into());
        }
        println!("{name:<24} {dim:>5} {:>10} {:>6} {se:>6}", via_graph.to_string(), sdp.count);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
