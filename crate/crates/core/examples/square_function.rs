//! `‖Sf‖₂/‖f‖₂` for random unit-norm inputs, over nested dyadic windows.
//!
//!     cargo run --release --example square_function -- [seed]

use discrete_maximal::function::LatticeFunction;
use discrete_maximal::operators::{dyadic_window, square_function};

fn main() -> discrete_maximal::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for (q, d, side) in [(2.0, 1, 41), (2.0, 2, 41), (3.0, 2, 41), (3.0, 3, 11)] {
        let f = LatticeFunction::random(vec![0; d], vec![side; d], seed)?;
        let f = f.scaled(1.0 / f.norm(2.0)?);
        print!("q={q} d={d}:");
        for (c1, c2) in [(1.0, 10.0), (2.0, 10.0), (5.0, 10.0), (10.0, 10.0)] {
            let w = dyadic_window(q, d, c1, c2)?;
            if w.is_empty() {
                print!("  D({c1},{c2}) empty");
                continue;
            }
            print!("  D({c1},{c2}) {w:?} -> {:.4}", square_function(q, c1, c2, &f)?.norm(2.0)?);
        }
        println!();
    }
    Ok(())
}
