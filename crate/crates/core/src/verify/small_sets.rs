use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::series::slice_threshold;
use crate::error::{invalid, Result};
use crate::geometry::{kappa, lattice_count, BodySpec, LatticeBall};
use crate::params;
use crate::report::{gate, Oracle, VerificationReport};
use crate::rng::stream;

const ENUMERATION_LIMIT: f64 = 2e8;

/// Runs `f` over the lattice points of `B_N^q` and returns the point count,
/// refusing balls above the enumeration limit.
fn enumerate(q: u32, d: usize, n: f64, f: &mut dyn FnMut(&[i64])) -> Result<f64> {
    let body = BodySpec::qball(q as f64, d)?;
    let count = lattice_count(&body, n)?.to_f64();
    if count > ENUMERATION_LIMIT {
        return Err(crate::Error::BudgetExceeded {
            what: "small-set enumeration",
            limit: ENUMERATION_LIMIT as u128,
        });
    }
    LatticeBall::new(&body, n)?.for_each(f);
    Ok(count)
}

fn kappa_gate(q: u32, d: usize, n: f64) -> Result<(f64, crate::report::Gate)> {
    let k = kappa(q as f64, d, n)?;
    Ok((k, gate("kappa(d, N) >= 10", k >= 10.0)))
}

/// `E = {x ∈ B_N^q ∩ Z^d : #{i : |x_i| >= ε₂κ} <= ε₁d}` has at most
/// `2e^{-d/10}|B_N^q ∩ Z^d|` points when `ε₁, ε₂ ∈ (0, 1/(10q)]` and
/// `κ >= 10`. Counted by enumeration.
pub fn check_sparse_large_coordinates(q: u32, d: usize, n: f64, eps1: f64, eps2: f64) -> Result<VerificationReport> {
    if q == 0 {
        return Err(invalid("q", "need q >= 1"));
    }
    let (k, kg) = kappa_gate(q, d, n)?;
    let cut = eps2 * k;
    let allowed = eps1 * d as f64;
    let mut e = 0u64;
    let count = enumerate(q, d, n, &mut |x| {
        let big = x.iter().filter(|v| v.unsigned_abs() as f64 >= cut).count();
        e += (big as f64 <= allowed) as u64;
    })?;
    let top = 1.0 / (10.0 * q as f64);
    let rhs = 2.0 * (-(d as f64) / 10.0).exp() * count;
    Ok(VerificationReport::inequality(
        "sparse_large_coordinates",
        params! {"q" => q, "d" => d, "N" => n, "eps1" => eps1, "eps2" => eps2},
        vec![
            gate("0 < eps1 <= 1/(10q)", eps1 > 0.0 && eps1 <= top),
            gate("0 < eps2 <= 1/(10q)", eps2 > 0.0 && eps2 <= top),
            kg,
        ],
        e as f64,
        rhs,
        0.0,
        Oracle::Exact,
    )
    .with_detail(format!("|E| = {e} of {count} lattice points")))
}

/// `E = {x ∈ B_N^q ∩ Z^d : Σ_{i<=r} |x_i|^q < ε^{q+1}κ^q r}` has at most
/// `4e^{-εr/10}|B_N^q ∩ Z^d|` points when `ε ∈ (0, 1/(50q)]`, `1 <= r <= d`
/// and `κ >= 10`. Counted by enumeration.
pub fn check_small_head_mass(q: u32, d: usize, n: f64, eps: f64, r: usize) -> Result<VerificationReport> {
    if q == 0 || r == 0 || r > d {
        return Err(invalid("q, r", "need q >= 1 and 1 <= r <= d"));
    }
    let (k, kg) = kappa_gate(q, d, n)?;
    let cut = eps.powi(q as i32 + 1) * k.powi(q as i32) * r as f64;
    let mut e = 0u64;
    let count = enumerate(q, d, n, &mut |x| {
        let s: u64 = x[..r].iter().map(|v| v.unsigned_abs().pow(q)).sum();
        e += ((s as f64) < cut) as u64;
    })?;
    let rhs = 4.0 * (-eps * r as f64 / 10.0).exp() * count;
    Ok(VerificationReport::inequality(
        "small_head_mass",
        params! {"q" => q, "d" => d, "N" => n, "eps" => eps, "r" => r},
        vec![gate("0 < eps <= 1/(50q)", eps > 0.0 && eps <= 1.0 / (50.0 * q as f64)), kg],
        e as f64,
        rhs,
        0.0,
        Oracle::Exact,
    )
    .with_detail(format!("|E| = {e} of {count} lattice points")))
}

/// Parameters of the cube-slice estimate.
#[derive(Clone, Copy, Debug)]
pub struct SliceCase {
    pub q: f64,
    pub d: usize,
    pub n: f64,
    pub a: f64,
    pub j: u64,
}

/// `|Q ∩ (B_N^q - x)| <= e^{-7j²/(128q²)}` for `x` in the shell
/// `N(1 + j/N)^{1/q} <= ‖x‖_q <= N(1 + (j+1)/N)^{1/q}`, with `Q = [-1/2, 1/2]^d`.
///
/// The slice volume is estimated at `points` centres (the first on the
/// diagonal, the rest in random directions) with `trials` uniform draws
/// each; the largest estimate is compared with its standard error.
/// Asserted when `q >= 2`, `N >= ad`, `0 <= j <= N - 1`, `ad >= d^{1/q}` and
/// `(A_q + Σ_{k>=2} |binom(q, k)| 2^{1-k}) d^{2/q-1} / a <= 1/2`.
pub fn check_cube_slice(case: SliceCase, points: u64, trials: u64, seed: u64) -> Result<VerificationReport> {
    let SliceCase { q, d, n, a, j } = case;
    if d == 0 || points == 0 || trials == 0 || !(q >= 1.0 && q.is_finite()) || !(n > 0.0) || !(a > 0.0) {
        return Err(invalid("q, d, N, a", "need finite q >= 1, d >= 1, N > 0, a > 0, points, trials >= 1"));
    }
    let (r_lo, r_hi) = (
        n * (1.0 + j as f64 / n).powf(1.0 / q),
        n * (1.0 + (j + 1) as f64 / n).powf(1.0 / q),
    );
    let nq = n.powf(q);
    let estimate = |p: u64| {
        let mut rng = stream(seed, p * (trials + 1));
        let dir: Vec<f64> = if p == 0 {
            vec![1.0; d]
        } else {
            (0..d).map(|_| rng.sample(StandardNormal)).collect()
        };
        let norm = dir.iter().map(|v: &f64| v.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        let rho = r_lo + rng.random::<f64>() * (r_hi - r_lo);
        let x: Vec<f64> = dir.iter().map(|v| rho * v / norm).collect();
        let hits: u64 = (0..trials)
            .map(|t| {
                let mut rng = stream(seed, p * (trials + 1) + 1 + t);
                let s: f64 = x.iter().map(|xi| (xi + rng.random_range(-0.5..0.5)).abs().powf(q)).sum();
                (s <= nq) as u64
            })
            .sum();
        (hits as f64 / trials as f64, p)
    };
    let (best, at) = (0..points)
        .into_par_iter()
        .map(estimate)
        .reduce(|| (-1.0, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let stderr = (best * (1.0 - best) / trials as f64).sqrt();
    let df = d as f64;
    let threshold = slice_threshold(q, a, d);
    let gates = vec![
        gate("q >= 2", q >= 2.0),
        gate("N >= a d", n >= a * df),
        gate("0 <= j <= N - 1", (j as f64) <= n - 1.0),
        gate("a d >= d^(1/q)", a * df >= df.powf(1.0 / q)),
        gate(
            "(A_q + sum_{k>=2} |binom(q,k)| 2^(1-k)) d^(2/q-1) / a <= 1/2",
            threshold <= 0.5,
        ),
    ];
    let bound = (-7.0 * (j * j) as f64 / (128.0 * q * q)).exp();
    Ok(VerificationReport::inequality(
        "cube_slice",
        params! {"q" => q, "d" => d, "N" => n, "a" => a, "j" => j, "points" => points, "trials" => trials},
        gates,
        best,
        bound,
        0.0,
        Oracle::MonteCarlo { trials: points * trials, seed, stderr },
    )
    .with_detail(format!("largest estimate at centre {at}; largeness quantity {threshold}")))
}
