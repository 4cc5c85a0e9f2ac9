//! The centred discrete maximal function of a few atoms over the cube and the
//! disc, with every scale, scales beyond a threshold, and a dyadic window.
//!
//!     cargo run --release --example maximal_function

use discrete_maximal::constants::weak_ratio;
use discrete_maximal::function::LatticeFunction;
use discrete_maximal::geometry::BodySpec;
use discrete_maximal::operators::{average, maximal, ScaleSelector};

fn main() -> discrete_maximal::Result<()> {
    let f = LatticeFunction::from_atoms(1, &[(vec![0], 1.0), (vec![6], 1.0)])?;
    let cube = BodySpec::cube(1);
    let a = average(&cube, 3.0, &f)?;
    println!("A_3 f on Z:   {:.3?}", a.values());
    for sel in [
        ScaleSelector::All { t_max: 10.0 },
        ScaleSelector::GreaterThan { d: 4.0, t_max: 10.0 },
        ScaleSelector::Explicit { scales: vec![1.0, 2.0, 4.0, 8.0] },
    ] {
        let m = maximal(&cube, &sel, &f)?;
        let w = weak_ratio(&cube, &sel, &f)?;
        let row: Vec<String> = m.iter().filter(|(x, _)| x[0] >= -2 && x[0] <= 8).map(|(_, v)| format!("{v:.3}")).collect();
        println!("{sel:?}\n  M f on [-2, 8]: {}\n  weak ratio {:.4} at level {:.4}", row.join(" "), w.ratio, w.level);
    }

    let disc = BodySpec::qball(2.0, 2)?;
    let g = LatticeFunction::indicator(vec![-1, -1], vec![3, 3])?;
    let m = maximal(&disc, &ScaleSelector::DyadicWindow { c1: 1.0, c2: 4.0 }, &g)?;
    println!("\ndisc, dyadic window: sup M g = {:.4}, |M g|_2 / |g|_2 = {:.4}", m.max_abs(), m.norm(2.0)? / g.norm(2.0)?);
    Ok(())
}
