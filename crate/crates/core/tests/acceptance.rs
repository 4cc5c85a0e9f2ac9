//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines appear in
//! `cargo test` output without `--nocapture`.

use std::time::{Duration, Instant};

use discrete_maximal::constants::{
    check_step_extension, melas_constant, sample_and_compare, search_weak_constant, strong_ratio, triangular_bump,
    weak_ratio, SearchConfig,
};
use discrete_maximal::function::LatticeFunction;
use discrete_maximal::geometry::{lattice_count, BodySpec};
use discrete_maximal::multiplier::{fourier_transform, semigroup_multiplier, sample_frequency, verify_prop1};
use discrete_maximal::operators::{dyadic_window, semigroup_apply, square_function, HeatKernel, ScaleSelector};
use discrete_maximal::report::{Verdict, VerificationReport};
use discrete_maximal::verify::{c_tilde, check_count_volume, check_hanner, monte_carlo_permutations, PermutationCase};

/// Reachable weak-(1,1) lower bound for the d=1 cube under the frozen search
/// configuration of criterion 6.
const FROZEN_WEAK_BOUND: f64 = 1.3571428571428572;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// Reports asserted in their regime must pass.
fn failures(reports: &[VerificationReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| format!("{} {:?} lhs={} rhs={}", r.check_name, r.parameters, r.lhs, r.rhs))
        .collect()
}

/// Brute-force count over the integer bounding box with a membership test
/// written from the body's definition. For integer `q` and `2t` integer the
/// test is exact: `Σ|2x_i|^q <= (2t)^q`.
fn brute_count(kind: &Kind, d: usize, t: f64) -> u64 {
    let reach = match kind {
        Kind::Ellipsoid(w) => w.iter().map(|&w| (t / w).floor() as i64).max().unwrap(),
        _ => t.floor() as i64,
    };
    let side = (2 * reach + 1) as u64;
    let mut count = 0;
    let mut x = vec![0i64; d];
    for mut b in 0..side.pow(d as u32) {
        for v in x.iter_mut() {
            *v = (b % side) as i64 - reach;
            b /= side;
        }
        let inside = match kind {
            Kind::Cube => x.iter().all(|v| (v.abs() as f64) <= t),
            Kind::IntQ(q) => {
                let t2 = (2.0 * t) as u128;
                x.iter().map(|v| (2 * v.unsigned_abs() as u128).pow(*q)).sum::<u128>() <= t2.pow(*q)
            }
            Kind::RealQ(q) => x.iter().map(|&v| (v.abs() as f64).powf(*q)).sum::<f64>() <= (t + 1e-9).powf(*q),
            Kind::Ellipsoid(w) => {
                x.iter().zip(w).map(|(&v, w)| (v as f64 * w).powi(2)).sum::<f64>() <= (t + 1e-9).powi(2)
            }
        };
        count += inside as u64;
    }
    count
}

enum Kind {
    Cube,
    IntQ(u32),
    RealQ(f64),
    Ellipsoid(Vec<f64>),
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in 1..=4 {
        let family: Vec<f64> = (0..d).map(|j| 1.0 + (2f64.sqrt() - 1.0) * j as f64 / d as f64).collect();
        let generic = [0.7, 1.3, 2.0, 0.9][..d].to_vec();
        let bodies = [
            (Kind::Cube, BodySpec::cube(d)),
            (Kind::IntQ(1), BodySpec::qball(1.0, d).unwrap()),
            (Kind::IntQ(2), BodySpec::qball(2.0, d).unwrap()),
            (Kind::IntQ(3), BodySpec::qball(3.0, d).unwrap()),
            (Kind::IntQ(4), BodySpec::qball(4.0, d).unwrap()),
            (Kind::RealQ(1.5), BodySpec::qball(1.5, d).unwrap()),
            (Kind::Ellipsoid(family.clone()), BodySpec::ellipsoid(family).unwrap()),
            (Kind::Ellipsoid(generic.clone()), BodySpec::ellipsoid(generic).unwrap()),
        ];
        for (kind, body) in &bodies {
            for h in 1..=16 {
                let t = h as f64 / 2.0;
                let got = lattice_count(body, t).unwrap().to_u128().unwrap();
                let want = brute_count(kind, d, t) as u128;
                cases += 1;
                if got != want {
                    bad.push(format!("{body:?} t={t}: {got} != {want}"));
                }
            }
        }
    }
    let el = start.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(60);
    outcome(pass, format!("{cases} (body, d, t) cases, {} mismatches, {}; {}", bad.len(), secs(el), bad.join("; ")))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for q in [1.0, 2.0, 3.0, 4.0] {
        for d in 1..=6 {
            for n in 1..=20 {
                let reps = check_count_volume(q, d, n as f64).unwrap();
                let sandwich: Vec<_> = reps
                    .into_iter()
                    .filter(|r| r.check_name == "count_lower" || r.check_name == "count_upper")
                    .collect();
                cases += 1;
                bad.extend(failures(&sandwich));
            }
        }
    }
    let el = start.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(300);
    outcome(pass, format!("{cases} grid points, {} violations, {}; {}", bad.len(), secs(el), bad.join("; ")))
}

fn criterion_3() -> Outcome {
    let mut in_regime = 0;
    let mut bad = Vec::new();
    for q in [2.0, 3.0, 4.0] {
        for d in 1..=5 {
            for n in 1..=30 {
                let chain: Vec<_> = check_count_volume(q, d, n as f64)
                    .unwrap()
                    .into_iter()
                    .filter(|r| r.check_name == "count_vs_dilate" || r.check_name == "dilate_vs_volume")
                    .collect();
                in_regime += chain.iter().filter(|r| r.hypothesis_regime).count();
                bad.extend(failures(&chain));
            }
        }
    }
    let exact = c_tilde(2.0) == 9.0 / 4.0;
    let pass = bad.is_empty() && exact && in_regime > 0;
    outcome(
        pass,
        format!("{in_regime} in-regime comparisons, {} violations, c_tilde(2) = {}; {}", bad.len(), c_tilde(2.0), bad.join("; ")),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst = f64::INFINITY;
    let mut index = 0;
    for q in [2.0, 3.0] {
        for d in 1..=4 {
            for n in 1..=10 {
                let r = verify_prop1(q, d, n as f64, 10_000, index).unwrap();
                index += 1;
                worst = worst.min(r.margin);
                bad.extend(failures(std::slice::from_ref(&r)));
            }
        }
    }
    let el = start.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(120);
    outcome(pass, format!("80 grid points x 1e4 frequencies, smallest margin {worst:.3e}, {}; {}", secs(el), bad.join("; ")))
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut seed = 0;
    for q in [2.0, 2.5, 3.0, 4.0] {
        for d in 1..=8 {
            let r = check_hanner(q, d, 10.0, 100_000, seed).unwrap();
            seed += 1;
            if r.verdict != Verdict::Pass {
                bad.push(format!("q={q} d={d}: {:?} lhs={} rhs={}", r.verdict, r.lhs, r.rhs));
            }
        }
    }
    outcome(bad.is_empty(), format!("32 (q, d) cells x 1e5 pairs, {} violations; {}", bad.len(), bad.join("; ")))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig {
        atoms_max: 4,
        radius: 40,
        weights: vec![1.0],
        budget: 100_000,
        seed: 1,
        ..SearchConfig::default()
    };
    let est = search_weak_constant(&BodySpec::cube(1), &cfg).unwrap();
    let barrier = melas_constant() + 1e-9;
    let trace = est.search_trace.clone().unwrap_or_default();
    let max_seen = trace.improvements.iter().map(|&(_, r)| r).fold(est.lower_bound, f64::max);
    let replay = est.recompute().unwrap();
    let pass = est.lower_bound >= 1.2
        && max_seen <= barrier
        && (est.lower_bound - FROZEN_WEAK_BOUND).abs() <= 1e-12
        && replay == est.lower_bound;
    outcome(
        pass,
        format!(
            "lower bound {} (frozen {FROZEN_WEAK_BOUND}), largest evaluation {max_seen} <= {barrier}, {} evaluations, {}",
            est.lower_bound,
            trace.evaluations,
            secs(start.elapsed())
        ),
    )
}

fn criterion_7() -> Outcome {
    let cube = BodySpec::cube(1);
    let mut bad = Vec::new();
    for t_max in [1.0, 10.0, 1000.0] {
        let w = weak_ratio(&cube, &ScaleSelector::All { t_max }, &LatticeFunction::delta(1)).unwrap();
        if w.ratio != 1.0 {
            bad.push(format!("weak ratio {} at t_max {t_max}", w.ratio));
        }
    }
    let bodies = [BodySpec::cube(1), BodySpec::cube(2), BodySpec::qball(2.0, 2).unwrap(), BodySpec::qball(1.0, 3).unwrap()];
    for (k, body) in bodies.iter().enumerate() {
        let d = body.dim();
        for seed in 0..5 {
            let f = LatticeFunction::random(vec![0; d], vec![5; d], 100 * k as u64 + seed).unwrap();
            let r = strong_ratio(body, &ScaleSelector::All { t_max: 6.0 }, &f, f64::INFINITY).unwrap();
            if r != 1.0 {
                bad.push(format!("strong ratio {r} for {body:?} seed {seed}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("3 Dirac cases, 20 sup-norm cases; {}", bad.join("; ")))
}

/// `e^{-x} I_n(x)` with `x = t/2`, from the power series of the modified
/// Bessel function; the one-dimensional heat kernel at `n`.
fn bessel_kernel(t: f64, n: u32) -> f64 {
    let x = t / 2.0;
    let mut term = (0..n).fold(1.0, |p, k| p * (x / 2.0) / (k + 1) as f64);
    let mut sum = 0.0;
    for m in 0..400 {
        sum += term;
        term *= (x / 2.0).powi(2) / ((m + 1) as f64 * (m + 1 + n) as f64);
        if term < 1e-300 {
            break;
        }
    }
    (-x).exp() * sum
}

fn sup_diff(a: &LatticeFunction, b: &LatticeFunction) -> f64 {
    let one = a.iter().map(|(x, v)| (v - b.get(&x)).abs()).fold(0.0, f64::max);
    let two = b.iter().map(|(x, v)| (v - a.get(&x)).abs()).fold(0.0, f64::max);
    one.max(two)
}

fn criterion_8() -> Outcome {
    let ts = [0.1, 1.0, 10.0];
    let mut bad = Vec::new();
    let mut worst = [0.0f64; 4];
    for &t in &ts {
        let k = HeatKernel::new(t).unwrap();
        let bessel = (-k.radius..=k.radius)
            .map(|n| (k.at(n) - bessel_kernel(t, n.unsigned_abs() as u32)).abs())
            .fold(0.0, f64::max);
        if bessel > 1e-10 {
            bad.push(format!("kernel at t={t} differs from the Bessel series by {bessel:e}"));
        }
        for d in 1..=3 {
            let p = semigroup_apply(t, &LatticeFunction::delta(d)).unwrap();
            let min = p.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let norm = (p.sum() - 1.0).abs();
            worst[0] = worst[0].max(norm);
            if min < 0.0 || norm > 1e-10 {
                bad.push(format!("kernel t={t} d={d}: min {min}, |sum-1| {norm:e}"));
            }
            let f = LatticeFunction::random(vec![-2; d], vec![5; d], d as u64).unwrap();
            for &s in &ts {
                let law = sup_diff(&semigroup_apply(s, &semigroup_apply(t, &f).unwrap()).unwrap(), &semigroup_apply(s + t, &f).unwrap());
                worst[1] = worst[1].max(law);
                if law > 1e-8 {
                    bad.push(format!("semigroup law s={s} t={t} d={d}: {law:e}"));
                }
            }
            let pf = semigroup_apply(t, &f).unwrap();
            for i in 0..50 {
                let xi = sample_frequency(d, 17, i);
                let (re, im) = fourier_transform(&pf, &xi).unwrap();
                let (fr, fi) = fourier_transform(&f, &xi).unwrap();
                let m = semigroup_multiplier(t, &xi).unwrap();
                let err = (re - m * fr).hypot(im - m * fi);
                worst[2] = worst[2].max(err);
                if err > 1e-8 {
                    bad.push(format!("transform t={t} d={d} xi={:?}: {err:e}", xi.xi()));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "t in {ts:?}, d <= 3: |mass-1| {:.1e}, law {:.1e}, transform {:.1e}; {}",
            worst[0],
            worst[1],
            worst[2],
            bad.join("; ")
        ),
    )
}

fn criterion_9() -> Outcome {
    // Nested windows, widest first; D_{10,10} is the last.
    let windows = [(1.0, 10.0), (2.0, 10.0), (5.0, 10.0), (10.0, 10.0)];
    let sides = [41usize, 41, 11];
    let mut bad = Vec::new();
    let mut recorded = Vec::new();
    for q in [2.0, 3.0] {
        for d in 1..=3 {
            let side = sides[d - 1];
            let seed = 1000 + d as u64;
            let f = LatticeFunction::random(vec![0; d], vec![side; d], seed).unwrap();
            let f = f.scaled(1.0 / f.norm(2.0).unwrap());
            let mut prev = f64::INFINITY;
            let mut ratios = Vec::new();
            for &(c1, c2) in &windows {
                if dyadic_window(q, d, c1, c2).unwrap().is_empty() {
                    ratios.push("empty".to_string());
                    continue;
                }
                let ratio = square_function(q, c1, c2, &f).unwrap().norm(2.0).unwrap();
                let again = square_function(q, c1, c2, &f).unwrap().norm(2.0).unwrap();
                if !ratio.is_finite() || ratio != again {
                    bad.push(format!("q={q} d={d} window ({c1},{c2}): {ratio} vs {again}"));
                }
                if ratio > prev * (1.0 + 1e-12) {
                    bad.push(format!("q={q} d={d} window ({c1},{c2}) grew: {ratio} > {prev}"));
                }
                prev = ratio;
                ratios.push(format!("{ratio:.4}"));
            }
            recorded.push(format!("q={q} d={d} side={side}: [{}]", ratios.join(", ")));
        }
    }
    outcome(bad.is_empty(), format!("{}; {}", recorded.join(" | "), bad.join("; ")))
}

/// In-regime cases: `u` decreasing from `(1-δ0)/2` to 0, `J` a suffix and
/// `δ1 = |I|/d`.
fn permutation_cases(d: usize) -> Vec<PermutationCase> {
    let delta0 = 0.5;
    let top = (1.0 - delta0) / 2.0;
    let u: Vec<f64> = (0..d).map(|k| top * (d - 1 - k) as f64 / d.max(2) as f64).collect();
    let mut out = Vec::new();
    for i_len in [d.div_ceil(2), d] {
        for j_len in [1, d.div_ceil(2), d] {
            let i: Vec<usize> = (1..=i_len).collect();
            let j: Vec<usize> = (d - j_len + 1..=d).collect();
            let delta1 = i_len as f64 / d as f64;
            out.push(PermutationCase::new(d, i, j, u.clone(), delta0, delta1).unwrap());
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut exhaustive = 0;
    for d in 1..=8 {
        for case in permutation_cases(d) {
            let reps = case.exhaustive().unwrap();
            exhaustive += reps.iter().filter(|r| r.hypothesis_regime).count();
            bad.extend(reps.iter().filter(|r| r.hypothesis_regime && r.verdict != Verdict::Pass).map(|r| {
                format!("d={d} {} lhs={} rhs={}", r.check_name, r.lhs, r.rhs)
            }));
        }
    }
    let mut sampled = 0;
    for d in [9, 16, 32, 64] {
        for (k, case) in permutation_cases(d).into_iter().enumerate() {
            let reps = monte_carlo_permutations(&case, 100_000, 10 * d as u64 + k as u64).unwrap();
            sampled += reps.iter().filter(|r| r.hypothesis_regime).count();
            bad.extend(failures(&reps));
        }
    }
    let el = start.elapsed();
    let pass = bad.is_empty() && el < Duration::from_secs(180);
    outcome(
        pass,
        format!("{exhaustive} exhaustive and {sampled} sampled in-regime bounds, {}; {}", secs(el), bad.join("; ")),
    )
}

fn criterion_11() -> Outcome {
    let mut bad = Vec::new();
    let bump = triangular_bump(1, 0.01).unwrap();
    let r = sample_and_compare(&bump, 100, &BodySpec::cube(1), 0.1).unwrap();
    if r.verdict != Verdict::Pass {
        bad.push(format!("sampling: {:?} lhs={} rhs={}", r.verdict, r.lhs, r.rhs));
    }
    let sampling = (r.lhs, r.rhs);
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..5 {
        let f = LatticeFunction::random(vec![-3], vec![8], seed).unwrap();
        for h in [0.5, 0.1] {
            let r = check_step_extension(&f, 0.5, h).unwrap();
            worst = worst.max(r.lhs);
            if r.verdict != Verdict::Pass {
                bad.push(format!("step extension seed {seed} h={h}: {:?} lhs={}", r.verdict, r.lhs));
            }
        }
    }
    let dirac = check_step_extension(&LatticeFunction::delta(1), 0.5, 0.1).unwrap();
    if dirac.verdict != Verdict::Pass {
        bad.push(format!("step extension of a Dirac mass: lhs={}", dirac.lhs));
    }
    outcome(
        bad.is_empty(),
        format!("sampling check {:.6} <= {:.6}, step extension worst gap {worst:.3e}; {}", sampling.0, sampling.1, bad.join("; ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("counting oracle equivalence", criterion_1),
        ("count sandwich", criterion_2),
        ("count/volume chain", criterion_3),
        ("multiplier near the origin", criterion_4),
        ("Hanner inequality", criterion_5),
        ("weak-(1,1) barrier", criterion_6),
        ("weak and sup-norm ratio closed forms", criterion_7),
        ("semigroup properties", criterion_8),
        ("square function ratios", criterion_9),
        ("permutation bounds", criterion_10),
        ("transference spot checks", criterion_11),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", k + 1, o.detail.trim_end_matches("; "));
        failed += !o.pass as usize;
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
