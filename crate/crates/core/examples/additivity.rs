// Υ is multiplicative on Pauli channels, so the rate (1/n) log₂ Υ(N^⊗n)
// does not move with n. For a nonunital channel two copies can beat one.

use std::error::Error;

use qns_capacity::capacity::{c0_qns_finite_n, upsilon};
use qns_capacity::channel::{extremal_channel, pauli_channel, tensor};
use qns_capacity::sdp::SolverConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    let a = pauli_channel([0.5, 0.5, 0.0, 0.0])?;
    let b = pauli_channel([0.6, 0.2, 0.2, 0.0])?;
    let ua = upsilon(&a, &cfg)?.value;
    let ub = upsilon(&b, &cfg)?.value;
    let uab = upsilon(&tensor(&a, &b), &cfg)?;
    println!("Υ(a) = {ua:.9}, Υ(b) = {ub:.9}, Υ(a⊗b) = {:.9} (16×16 blocks)", uab.value);
    if (uab.value - ua * ub).abs() > 1e-5 {
        return Err("Pauli product is not multiplicative".into());
    }

    let ext = extremal_channel(0.7, 0.3);
    for n in 1..=2 {
        let s = c0_qns_finite_n(&ext, n, &cfg)?;
        println!(
            "extremal θ=0.7 φ=0.3, n={n}: Υ = {:.9}, rate {:.9} bits, certified {}",
            s.upsilon.value, s.bits, s.upsilon.certified
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
