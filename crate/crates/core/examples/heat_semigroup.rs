//! The discrete heat semigroup: kernel values, mass, the semigroup law and
//! the symbol `e^{-t Σ sin²(πξ_i)}` recovered from a direct transform.
//!
//!     cargo run --release --example heat_semigroup

use discrete_maximal::function::LatticeFunction;
use discrete_maximal::multiplier::{fourier_transform, semigroup_multiplier, FrequencyPoint};
use discrete_maximal::operators::{semigroup_apply, HeatKernel};

fn main() -> discrete_maximal::Result<()> {
    for t in [0.1, 1.0, 10.0, 100.0] {
        let k = HeatKernel::new(t)?;
        let mass: f64 = k.weights.iter().sum();
        println!("t = {t:>5}: radius {:>3}, k(0) = {:.6}, k(1) = {:.6}, mass - 1 = {:+.1e}", k.radius, k.at(0), k.at(1), mass - 1.0);
    }

    let f = LatticeFunction::random(vec![-2, -2], vec![5, 5], 3)?;
    let two = semigroup_apply(1.5, &semigroup_apply(2.5, &f)?)?;
    let one = semigroup_apply(4.0, &f)?;
    let gap = one.iter().map(|(x, v)| (v - two.get(&x)).abs()).fold(0.0, f64::max);
    println!("\n|P_1.5 P_2.5 f - P_4 f|_inf = {gap:.2e}");

    let xi = FrequencyPoint::new(vec![0.1, -0.3]);
    let (re, _) = fourier_transform(&semigroup_apply(2.0, &LatticeFunction::delta(2))?, &xi)?;
    println!("transform of P_2 δ at {:?}: {re:.12}, symbol {:.12}", xi.xi(), semigroup_multiplier(2.0, &xi)?);
    Ok(())
}
