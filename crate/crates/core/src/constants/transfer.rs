//! Sampling a continuous function at lattice points and extending a lattice
//! function by steps, with grid-level checks of the comparisons between the
//! discrete and continuous maximal functions.

use crate::error::{invalid, Error, Result};
use crate::function::{cell_count, GridFunction, LatticeFunction};
use crate::geometry::BodySpec;
use crate::operators::{continuous_maximal_grid, maximal, ScaleSelector};
use crate::params;
use crate::report::{gate, Oracle, VerificationReport, Verdict};

const EXACT_TOL: f64 = 1e-12;

/// Integer `n` with `|x - n| <= 1e-9·max(1, |x|)`.
fn as_integer(x: f64) -> Option<i64> {
    let n = x.round();
    ((x - n).abs() <= 1e-9 * x.abs().max(1.0)).then_some(n as i64)
}

/// `Σ_n f(n) δ^{-d} 1_{Q_δ(n)}` sampled on the grid `hℤ^d`, where `Q_δ(n)` is
/// the cube of side `δ` centred at `n`. Needs `δ/h` odd and `1/h` integer, so
/// every δ-cube is a union of whole grid cells.
pub fn step_extension(f: &LatticeFunction, delta: f64, h: f64) -> Result<GridFunction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("need delta in (0, 1), got {delta}")));
    }
    if !f.is_nonnegative() {
        return Err(Error::SignedInput);
    }
    let per_unit = as_integer(1.0 / h).filter(|&m| m > 0);
    let cells = as_integer(delta / h).filter(|&c| c > 0 && c % 2 == 1);
    let (Some(per_unit), Some(cells)) = (per_unit, cells) else {
        return Err(invalid("h", format!("need 1/h integer and delta/h odd, got h = {h}, delta = {delta}")));
    };
    let d = f.dim();
    let half = (cells - 1) / 2;
    let offset: Vec<i64> = f.offset().iter().map(|&o| o * per_unit - half).collect();
    let shape: Vec<usize> = f
        .shape()
        .iter()
        .map(|&s| (s as i64 - 1) as usize * per_unit as usize + cells as usize)
        .collect();
    let mut g = GridFunction::new(offset, shape.clone(), h, vec![0.0; cell_count(&shape)?])?;
    let height = delta.powi(d as i32).recip();
    for (n, v) in f.iter() {
        if v == 0.0 {
            continue;
        }
        let centre: Vec<i64> = n.iter().map(|&k| k * per_unit).collect();
        let block = (cells as usize).pow(d as u32);
        for b in 0..block {
            let mut r = b;
            let mut node = centre.clone();
            for x in node.iter_mut().rev() {
                *x += (r % cells as usize) as i64 - half;
                r /= cells as usize;
            }
            let i = g.index_of(&node).expect("block inside grid");
            g.values_mut()[i] = v * height;
        }
    }
    Ok(g)
}

/// Checks `M_* F_δ(x) >= ℳ_* f(n)` for every grid point `x` in the shrunken
/// cube `Q_{1-δ}(n)`, with the cube body. Continuous scales `N + 1/2`
/// reproduce each discrete radius `N`, and averages of the step function are
/// exact on grid cells, so the comparison holds up to rounding.
pub fn check_step_extension(f: &LatticeFunction, delta: f64, h: f64) -> Result<VerificationReport> {
    let d = f.dim();
    let body = BodySpec::cube(d);
    let step = step_extension(f, delta, h)?;
    let n_max = *f.shape().iter().max().expect("nonzero dimension") as f64;
    let discrete = maximal(&body, &ScaleSelector::All { t_max: n_max }, f)?;
    let scales: Vec<f64> = (0..=n_max as i64).map(|n| n as f64 + 0.5).collect();
    let cont = continuous_maximal_grid(&body, &scales, &step)?;
    let per_unit = (1.0 / h).round() as i64;
    let reach = ((1.0 - delta) / 2.0 / h + 1e-9).floor() as i64;
    let mut worst = f64::NEG_INFINITY;
    let mut points = 0u64;
    let side = (2 * reach + 1) as usize;
    for (n, m) in discrete.iter() {
        for b in 0..side.pow(d as u32) {
            let mut r = b;
            let mut node: Vec<i64> = n.iter().map(|&k| k * per_unit).collect();
            for x in node.iter_mut().rev() {
                *x += (r % side) as i64 - reach;
                r /= side;
            }
            worst = worst.max(m - cont.get(&node));
            points += 1;
        }
    }
    let scale = discrete.max_abs().max(f64::MIN_POSITIVE);
    let p = params! {"delta" => delta, "h" => h, "dim" => d, "t_max" => n_max, "points" => points};
    let gates = vec![gate("f >= 0", true), gate("0 < delta < 1", true), gate("cube body", true)];
    Ok(VerificationReport::inequality(
        "step_extension_dominates",
        p,
        gates,
        worst,
        0.0,
        EXACT_TOL * scale,
        Oracle::Exact,
    ))
}

/// Samples `f_K(n) = F(n/K)` and reports `min_n ℳ_* f_K(n) / M_* F_K(n)` over
/// the lattice points where `F(n/K) > 0`, against the threshold `1 - η`.
///
/// `F` is read as piecewise constant on its grid cells, which must resolve
/// `1/K`: `1/(K h)` has to be a positive integer. Continuous scales run over
/// `{h/4} ∪ (h/2)ℕ` up to the box width. The band `2·Lip·h / min M_* F`
/// bounds the relative grid error; a ratio within the band of the threshold
/// is inconclusive. Outside the regime `Lip/K <= η·max F` the verdict is
/// report-only.
pub fn sample_and_compare(f: &GridFunction, k: u64, body: &BodySpec, eta: f64) -> Result<VerificationReport> {
    if body.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: f.dim(),
        });
    }
    if k == 0 || !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("K, eta", "need K >= 1 and eta in (0, 1)"));
    }
    if !f.values().iter().all(|&v| v >= 0.0) || f.values().iter().all(|&v| v == 0.0) {
        return Err(invalid("F", "need a nonnegative, nonzero grid function"));
    }
    let d = f.dim();
    let h = f.mesh();
    let kf = k as f64;
    let p = params! {"K" => k, "eta" => eta, "h" => h, "dim" => d};
    let ratio = 1.0 / (kf * h);
    if ratio < 1.0 - 1e-9 {
        let mut r = VerificationReport::measurement("sampling_ratio", p, f64::NAN, Oracle::Exact)
            .with_detail("grid mesh coarser than 1/K; samples F(n/K) are not resolved");
        r.verdict = Verdict::Inconclusive;
        return Ok(r);
    }
    let r = as_integer(ratio).ok_or_else(|| invalid("h", format!("1/(K h) = {ratio} must be an integer")))?;

    let lip = lipschitz(f);
    let max_f = f.values().iter().cloned().fold(0.0, f64::max);
    let width = f.shape().iter().max().copied().unwrap_or(1) as f64 * h;
    let mut scales = vec![h / 4.0];
    let steps = (2.0 * width / h).ceil() as i64;
    scales.extend((1..=steps).map(|j| j as f64 * h / 2.0));
    let cont = continuous_maximal_grid(body, &scales, f)?;

    let mut atoms = Vec::new();
    for (i, &v) in f.values().iter().enumerate() {
        let node = f.node(i);
        if v > 0.0 && node.iter().all(|j| j.rem_euclid(r) == 0) {
            atoms.push((node.iter().map(|j| j / r).collect::<Vec<i64>>(), v));
        }
    }
    if atoms.is_empty() {
        let mut rep = VerificationReport::measurement("sampling_ratio", p, f64::NAN, Oracle::Exact)
            .with_detail("no lattice sample of F is positive");
        rep.verdict = Verdict::Inconclusive;
        return Ok(rep);
    }
    let fk = LatticeFunction::from_atoms(d, &atoms)?;
    let disc = maximal(body, &ScaleSelector::All { t_max: kf * scales[scales.len() - 1] }, &fk)?;

    let mut min_ratio = f64::INFINITY;
    let mut min_cont = f64::INFINITY;
    for (n, _) in &atoms {
        let node: Vec<i64> = n.iter().map(|x| x * r).collect();
        let c = cont.get(&node);
        min_cont = min_cont.min(c);
        min_ratio = min_ratio.min(disc.get(n) / c);
    }
    let band = 2.0 * lip * h / min_cont;
    let threshold = 1.0 - eta;
    let gates = vec![
        gate("Lip(F)/K <= eta * max F", lip / kf <= eta * max_f),
        gate("1/(K h) integer", true),
    ];
    let mut rep = VerificationReport::inequality("sampling_ratio", p, gates, threshold, min_ratio, 0.0, Oracle::Exact)
        .with_detail(format!("relative grid error band {band:e}"))
        .with_detail(format!("test points {}", atoms.len()));
    if rep.hypothesis_regime && rep.margin.abs() < band {
        rep.verdict = Verdict::Inconclusive;
    }
    Ok(rep)
}

/// Largest difference quotient between grid neighbours.
fn lipschitz(f: &GridFunction) -> f64 {
    let d = f.dim();
    let h = f.mesh();
    let mut lip = 0.0f64;
    for (i, &v) in f.values().iter().enumerate() {
        let node = f.node(i);
        for k in 0..d {
            let mut m = node.clone();
            m[k] += 1;
            lip = lip.max((f.get(&m) - v).abs() / h);
            if node[k] == f.offset()[k] {
                lip = lip.max(v.abs() / h);
            }
        }
    }
    lip
}

/// Triangular bump `max(0, 1 - |x|_∞)` sampled on `[-1, 1]^d`.
pub fn triangular_bump(d: usize, h: f64) -> Result<GridFunction> {
    GridFunction::sample(d, -1.0, 1.0, h, |x| {
        (1.0 - x.iter().fold(0.0f64, |m, v| m.max(v.abs()))).max(0.0)
    })
}
