// Nonunital qubit channels have Υ = 1, so a single use carries one message
// with zero error even with non-signalling assistance.

use std::error::Error;

use qns_capacity::capacity::full_report;
use qns_capacity::channel::{amplitude_damping, extremal_channel};
use qns_capacity::sdp::SolverConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    for gamma in [0.1, 0.5, 0.9] {
        let r = full_report(&amplitude_damping(gamma)?, &cfg, &[1])?;
        println!(
            "amplitude damping γ={gamma}: upsilon {:.9}, m0_qns {}, unital {}, certified {}",
            r.upsilon, r.m0_qns, r.unital, r.certified
        );
        if (r.upsilon - 1.0).abs() > 1e-6 || !r.certified {
            return Err(format!("unexpected report {r:?}").into());
        }
    }
    let r = full_report(&extremal_channel(0.7, 0.3), &cfg, &[1])?;
    println!(
        "extremal θ=0.7 φ=0.3: upsilon {:.9}, dim_s {}, m0_se {:?}, discrepancies {}",
        r.upsilon,
        r.dim_s,
        r.m0_se,
        r.discrepancies.len()
    );
    // On the unital diagonal cos²θ = cos²φ the channel is a Pauli channel.
    let r = full_report(&extremal_channel(0.7, 0.7), &cfg, &[1])?;
    println!("extremal θ=φ=0.7: upsilon {:.9}, unital {}", r.upsilon, r.unital);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
