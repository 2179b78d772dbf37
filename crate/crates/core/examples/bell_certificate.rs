// For a projection onto k orthogonal maximally entangled vectors the point
// S = (d/k)I, U = (d/k)P is optimal. Embed it in the reduced program, check
// it exactly, and compare with the solver.

use std::error::Error;

use qns_capacity::capacity::{
    build_from_projection, maximally_entangled_certificate, maximally_entangled_projection, solve_reduced,
};
use qns_capacity::sdp::{verify_primal, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SolverConfig::default();
    for (d, pairs) in [
        (2, vec![(0, 0), (1, 1)]),
        (2, vec![(0, 0), (0, 1), (1, 0)]),
        (3, vec![(0, 0), (1, 2)]),
    ] {
        let k = pairs.len();
        let p = maximally_entangled_projection(d, &pairs);
        let reduced = build_from_projection(p.clone(), d, d)?;
        let (s, u) = maximally_entangled_certificate(&p, d);
        let point = verify_primal(&reduced.problem, &reduced.embed(&s, &u));
        let solved = solve_reduced(&reduced, &cfg)?;
        println!(
            "d={d} k={k}: certificate objective {:.12} residual {:.1e}; solver {:.12} ({} constraints)",
            -point.objective,
            point.max_equality_residual,
            solved.value,
            reduced.problem.num_constraints()
        );
        if (solved.value + point.objective).abs() > 1e-6 {
            return Err("certificate and solver disagree".into());
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
