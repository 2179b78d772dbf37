// Υ of qubit Pauli channels against the closed form 4/k.

use std::error::Error;

use qns_capacity::capacity::{pauli_upsilon_analytic, snap_floor, upsilon};
use qns_capacity::channel::{pauli_channel, support_size};
use qns_capacity::sdp::SolverConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    let cases = [
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.5, 0.25, 0.25, 0.0],
        [0.4, 0.3, 0.2, 0.1],
    ];
    println!("{:<28} {:>3} {:>14} {:>8} {:>4}", "probs (I, Z, X, XZ)", "k", "upsilon", "4/k", "M0");
    for p in cases {
        let k = support_size(&p);
        let r = upsilon(&pauli_channel(p)?, &cfg)?;
        let exact = pauli_upsilon_analytic(k as u32, 2)?;
        if !r.certified {
            return Err(format!("uncertified solve for {p:?}").into());
        }
        let expected = *exact.numer() as f64 / *exact.denom() as f64;
        if (r.value - expected).abs() > 1e-6 {
            return Err(format!("upsilon {} differs from {exact}", r.value).into());
        }
        println!("{:<28} {k:>3} {:>14.10} {:>8} {:>4}", format!("{p:?}"), r.value, exact.to_string(), snap_floor(r.value));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
