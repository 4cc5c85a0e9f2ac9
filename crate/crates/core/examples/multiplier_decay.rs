//! Multipliers of q-ball averages: the bound near the origin on random
//! frequencies, and measured decay envelopes away from it, discrete and
//! continuous.
//!
//!     cargo run --release --example multiplier_decay

use discrete_maximal::multiplier::{
    continuous_decay_envelope, continuous_multiplier, multiplier, verify_prop1, verify_prop2_envelope, FrequencyPoint,
};
use discrete_maximal::geometry::BodySpec;

fn main() -> discrete_maximal::Result<()> {
    let body = BodySpec::qball(2.0, 3)?;
    for x in [0.0, 0.01, 0.05, 0.1, 0.25, 0.5] {
        let xi = FrequencyPoint::new(vec![x, x / 2.0, 0.0]);
        println!(
            "ξ = ({x:.2}, {:.3}, 0): discrete {:+.6}  continuous {:+.6}",
            x / 2.0,
            multiplier(&body, 8.0, &xi)?,
            continuous_multiplier(2.0, 8.0, xi.xi())?
        );
    }

    println!();
    for (q, d, n) in [(2.0, 2, 5.0), (2.0, 4, 10.0), (3.0, 3, 8.0)] {
        let r = verify_prop1(q, d, n, 2000, 7)?;
        println!("near origin q={q} d={d} N={n}: tightest |m-1| = {:.3e} vs bound {:.3e} -> {:?}", r.lhs, r.rhs, r.verdict);
    }

    let grid: Vec<(usize, f64)> = [2, 4, 8].iter().flat_map(|&d| [8.0, 16.0].map(|n| (d, n))).collect();
    let mut out = std::io::stdout();
    println!("\ndiscrete envelope");
    verify_prop2_envelope(2.0, &grid, 500, 1)?.write_csv(&mut out)?;
    // The continuous multiplier is evaluated by quadrature for d <= 3 only.
    let small: Vec<(usize, f64)> = [1, 2, 3].iter().flat_map(|&d| [8.0, 16.0].map(|n| (d, n))).collect();
    println!("continuous envelope");
    continuous_decay_envelope(2.0, &small, 500, 1)?.write_csv(&mut out)?;
    Ok(())
}
