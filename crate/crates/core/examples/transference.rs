//! Sampling a slowly varying bump at lattice points and extending a lattice
//! function by steps, comparing discrete and continuous maximal functions.
//!
//!     cargo run --release --example transference

use discrete_maximal::constants::{check_step_extension, sample_and_compare, step_extension, triangular_bump};
use discrete_maximal::function::LatticeFunction;
use discrete_maximal::geometry::BodySpec;

fn main() -> discrete_maximal::Result<()> {
    let bump = triangular_bump(1, 0.01)?;
    for k in [10, 50, 100] {
        let r = sample_and_compare(&bump, k, &BodySpec::cube(1), 0.1)?;
        println!("K = {k:>3}: min discrete/continuous = {:.6} (threshold {}) {:?}", r.rhs, r.lhs, r.verdict);
    }

    let f = LatticeFunction::from_atoms(1, &[(vec![0], 1.0), (vec![3], 0.5)])?;
    let step = step_extension(&f, 0.5, 0.1)?;
    println!("\nstep extension: {} grid cells, mass {:.6}", step.len(), step.norm(1.0)?);
    let r = check_step_extension(&f, 0.5, 0.1)?;
    println!("discrete maximal minus continuous, worst = {:.3e} {:?}", r.lhs, r.verdict);
    Ok(())
}
