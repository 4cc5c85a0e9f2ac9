//! Searches nonnegative atom sums for a large weak (1,1) ratio of the centred
//! maximal function on Z and compares the result with the Melas barrier.
//! Equally spaced trains of up to 32 atoms are tried first, then all sums of
//! at most 4 atoms in a box, then local perturbation.
//!
//!     cargo run --release --example weak_constant_search -- [budget] [seed]

use discrete_maximal::constants::{melas_constant, search_weak_constant, SearchConfig};
use discrete_maximal::geometry::BodySpec;

fn main() -> discrete_maximal::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let config = SearchConfig {
        atoms_max: 4,
        radius: 20,
        train_max: 32,
        t_max: Some(2000.0),
        budget: args.first().copied().unwrap_or(5_000),
        seed: args.get(1).copied().unwrap_or(1),
        ..Default::default()
    };
    let est = search_weak_constant(&BodySpec::cube(1), &config)?;
    let trace = est.search_trace.as_ref().expect("search records a trace");
    println!("lower bound   {:.10}", est.lower_bound);
    println!("melas barrier {:.10}", melas_constant());
    println!("level         {:?}", est.witness_level);
    println!(
        "evaluations   {} ({} structured, {} local, exhausted = {})",
        trace.evaluations, trace.structured_evaluations, trace.local_evaluations, trace.budget_exhausted
    );
    let atoms: Vec<String> = est
        .witness
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(x, v)| format!("{}:{v:.3}", x[0]))
        .collect();
    println!("witness       {}", atoms.join(" "));
    Ok(())
}
