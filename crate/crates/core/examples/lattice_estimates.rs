//! Numerical checks of the lattice estimates: count sandwiches, the
//! count/volume chain, Hanner's inequality, shifted balls and the
//! permutation bounds. Every line is a verification report.
//!
//!     cargo run --release --example lattice_estimates

use discrete_maximal::report::VerificationReport;
use discrete_maximal::verify::{
    c_tilde, check_count_volume, check_hanner, check_shift_difference, monte_carlo_permutations, PermutationCase,
};

fn show(r: &VerificationReport) {
    println!(
        "{:<32} lhs {:>12.6e}  rhs {:>12.6e}  in regime {:<5}  {:?}",
        r.check_name, r.lhs, r.rhs, r.hypothesis_regime, r.verdict
    );
}

fn main() -> discrete_maximal::Result<()> {
    println!("C̃_2 = {}, C̃_3 = {:.6}", c_tilde(2.0), c_tilde(3.0));
    for r in check_count_volume(2.0, 4, 12.0)? {
        show(&r);
    }
    show(&check_hanner(3.0, 6, 20.0, 20_000, 1)?);
    for r in check_shift_difference(2.0, 2, 200.0, 0.25, &[0.3, -0.2])? {
        show(&r);
    }
    let d = 7;
    let u: Vec<f64> = (0..d).map(|k| 0.25 * (d - 1 - k) as f64 / d as f64).collect();
    let case = PermutationCase::new(d, vec![1, 2, 3, 4], vec![5, 6, 7], u, 0.5, 4.0 / 7.0)?;
    for r in monte_carlo_permutations(&case, 0, 0)? {
        show(&r);
    }
    Ok(())
}
