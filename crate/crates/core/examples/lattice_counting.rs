//! Exact lattice-point counts of q-ball dilates against their volumes, from
//! the Gauss circle problem up to dimension 12.
//!
//!     cargo run --release --example lattice_counting

use discrete_maximal::geometry::{ball_volume, lattice_count, scale_breakpoints, BodySpec};

fn main() -> discrete_maximal::Result<()> {
    println!("Gauss circle: |B_N ∩ Z²| and the area πN²");
    let disc = BodySpec::qball(2.0, 2)?;
    for n in [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0] {
        let c = lattice_count(&disc, n)?;
        let area = ball_volume(2.0, 2, n)?.to_f64()?;
        println!("  N = {n:>6}  count {:>9}  area {area:>14.2}  error {:>+10.2}", c.count, c.to_f64() - area);
    }

    println!("\nq-balls at N = 6: count / volume as the dimension grows");
    for q in [1.0, 2.0, 3.0] {
        let row: Vec<String> = (1..=12)
            .map(|d| {
                let c = lattice_count(&BodySpec::qball(q, d)?, 6.0)?.to_f64();
                Ok(format!("{:.3}", c / ball_volume(q, d, 6.0)?.to_f64()?))
            })
            .collect::<discrete_maximal::Result<_>>()?;
        println!("  q = {q}: {}", row.join(" "));
    }

    let b = BodySpec::ellipsoid_family_default(3)?;
    let bp = scale_breakpoints(&b, 2.0)?;
    println!("\nellipsoid breakpoints in (0, 2]: {bp:.4?}");
    Ok(())
}
