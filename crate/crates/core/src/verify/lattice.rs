use num_bigint::BigUint;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::series::c_tilde;
use crate::error::{invalid, Error, Result};
use crate::geometry::{ball_volume, big_to_f64, iroot, kappa, lattice_count, BodySpec, GAUGE_TOL};
use crate::params;
use crate::report::{gate, Oracle, Verdict, VerificationReport};
use crate::rng::stream;

fn qnorm_pow(q: f64, x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs().powf(q)).sum()
}

/// A lattice point of `B_N^q`: a Gaussian direction at radius `N U^{1/d}`,
/// truncated towards zero.
fn lattice_point_in_ball(rng: &mut impl Rng, q: f64, d: usize, n: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let norm = qnorm_pow(q, &g).powf(1.0 / q);
    if norm == 0.0 {
        return vec![0.0; d];
    }
    let rho = n * rng.random::<f64>().powf(1.0 / d as f64);
    g.iter().map(|v| (rho * v / norm).trunc()).collect()
}

/// Hanner's inequality `‖x+y‖^q + ‖x-y‖^q <= (‖x‖+‖y‖)^q + |‖x‖-‖y‖|^q` on
/// `samples` pairs: `x` a lattice point of `B_N^q`, `y` uniform in
/// `[-1/2, 1/2]^d`. The report carries the pair with the largest relative
/// excess; slack is `1e-10` relative.
pub fn check_hanner(q: f64, d: usize, n: f64, samples: u64, seed: u64) -> Result<VerificationReport> {
    if d == 0 || samples == 0 || !(n >= 0.0 && n.is_finite()) || !q.is_finite() {
        return Err(invalid("q, d, N, samples", "need finite q, d >= 1, N >= 0, samples >= 1"));
    }
    let eval = |i: u64| {
        let mut rng = stream(seed, i);
        let x = lattice_point_in_ball(&mut rng, q, d, n);
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..0.5)).collect();
        let plus: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let (nx, ny) = (qnorm_pow(q, &x).powf(1.0 / q), qnorm_pow(q, &y).powf(1.0 / q));
        let lhs = qnorm_pow(q, &plus) + qnorm_pow(q, &minus);
        let rhs = (nx + ny).powf(q) + (nx - ny).abs().powf(q);
        let excess = if rhs > 0.0 { (lhs - rhs) / rhs } else { lhs };
        (excess, i, lhs, rhs)
    };
    let worst = (0..samples)
        .into_par_iter()
        .map(eval)
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX, 0.0, 0.0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let (_, index, lhs, rhs) = worst;
    Ok(VerificationReport::inequality(
        "hanner",
        params! {"q" => q, "d" => d, "N" => n, "samples" => samples, "seed" => seed},
        vec![gate("q >= 2", q >= 2.0)],
        lhs,
        rhs,
        1e-10 * rhs,
        Oracle::Exact,
    )
    .with_detail(format!("worst pair at sample index {index}")))
}

/// `⌊κ(d, N)⌋`, exact for integer `q` and integer `N`.
fn floor_kappa(q: f64, d: usize, n: f64) -> Result<u64> {
    if q.fract() == 0.0 && n.fract() == 0.0 && q <= 64.0 {
        let qi = q as u32;
        let nq = BigUint::from(n as u64).pow(qi);
        let bound = nq / BigUint::from(d);
        let guess = iroot(u64::try_from(&bound).unwrap_or(u64::MAX), qi);
        // `m^q d <= N^q` iff `m^q <= ⌊N^q / d⌋`.
        let mut m = guess;
        while BigUint::from(m + 1).pow(qi) <= bound {
            m += 1;
        }
        while m > 0 && BigUint::from(m).pow(qi) > bound {
            m -= 1;
        }
        return Ok(m);
    }
    Ok((kappa(q, d, n)? + GAUGE_TOL).floor() as u64)
}

/// The counting and volume bounds for `B_N^q ∩ Z^d`:
///
/// * `count_lower`: `(2⌊κ⌋ + 1)^d <= |B_N ∩ Z^d|`, compared exactly.
/// * `count_upper`: `|B_N ∩ Z^d| <= |B_{N + d^{1/q}}|`.
/// * `count_vs_dilate`: `|B_N ∩ Z^d| <= 2|B_{N_1}|` with
///   `N_1 = N(1 + C̃_q/d)^{1/q}`, asserted when `q >= 2` and `N >= d^{1/2+1/q}`.
/// * `dilate_vs_volume`: `2|B_{N_1}| <= 2e^{C̃_q/q}|B_N|` under the same gates.
/// * `volume_count_ratio`: `|B_N| / |B_N ∩ Z^d|`, recorded only.
///
/// Volume-side comparisons allow `1e-9` relative slack.
pub fn check_count_volume(q: f64, d: usize, n: f64) -> Result<Vec<VerificationReport>> {
    if !(q >= 1.0 && q.is_finite()) || d == 0 || !(n > 0.0 && n.is_finite()) {
        return Err(invalid("q, d, N", "need finite q >= 1, d >= 1, N > 0"));
    }
    let count = lattice_count(&BodySpec::qball(q, d)?, n)?;
    let c = count.to_f64();
    let base = || params! {"q" => q, "d" => d, "N" => n};
    let vol = |r: f64| -> Result<f64> { ball_volume(q, d, r)?.to_f64() };
    let mut out = Vec::new();

    let k = floor_kappa(q, d, n)?;
    let lower = BigUint::from(2 * k + 1).pow(d as u32);
    let mut r = VerificationReport::inequality(
        "count_lower",
        base(),
        vec![],
        big_to_f64(&lower),
        c,
        0.0,
        Oracle::Exact,
    )
    .with_detail(format!("floor(kappa) = {k}; exact {lower} <= {}", count.count));
    if lower > count.count {
        r.verdict = Verdict::Fail;
    }
    out.push(r);

    let up = vol(n + (d as f64).powf(1.0 / q))?;
    out.push(VerificationReport::inequality("count_upper", base(), vec![], c, up, 1e-9 * up, Oracle::Exact));

    let gates = || {
        vec![
            gate("q >= 2", q >= 2.0),
            gate("N >= d^(1/2 + 1/q)", n >= (d as f64).powf(0.5 + 1.0 / q)),
        ]
    };
    if q >= 2.0 {
        let ct = c_tilde(q);
        let n1 = n * (1.0 + ct / d as f64).powf(1.0 / q);
        let dilate = 2.0 * vol(n1)?;
        let far = 2.0 * (ct / q).exp() * vol(n)?;
        out.push(
            VerificationReport::inequality("count_vs_dilate", base(), gates(), c, dilate, 1e-9 * dilate, Oracle::Exact)
                .with_detail(format!("C_tilde = {ct}; N1 = {n1}")),
        );
        out.push(VerificationReport::inequality("dilate_vs_volume", base(), gates(), dilate, far, 1e-9 * far, Oracle::Exact));
    } else {
        let mut r = VerificationReport::measurement("count_vs_dilate", base(), c, Oracle::Exact);
        r.gates = gates();
        out.push(r.with_detail("C_tilde is defined for q >= 2 only"));
    }

    out.push(
        VerificationReport::measurement("volume_count_ratio", base(), vol(n)? / c, Oracle::Exact)
            .with_detail("the proportionality constant is not quantified; ratio recorded"),
    );
    Ok(out)
}

/// Lattice counts of the shifted and unshifted `q`-balls of radius `R` in
/// `Z^r`, compared with the volume and with each other:
///
/// * `shift_count`: `||(z + B_R) ∩ Z^r| - |B_R|| <= |B_R| r^{(q+1)/q} R^{-1} e^{r^{(q+1)/q}/R}`.
/// * `shift_symmetric_difference`: `|(B_R ∩ Z^r) △ ((z + B_R) ∩ Z^r)|
///   <= 4e(r|z|R^{-1} e^{r|z|/R} + e^{r|z|/R} R^{-1+(q+1)δ/q})|B_R|`.
///
/// Both are asserted when `R >= 1`, `δ ∈ (0, q/(q+1))` and `r <= R^δ`.
pub fn check_shift_difference(q: f64, r: usize, radius: f64, delta: f64, z: &[f64]) -> Result<Vec<VerificationReport>> {
    if z.len() != r {
        return Err(Error::DimensionMismatch { expected: r, got: z.len() });
    }
    if r == 0 || !(q >= 1.0 && q.is_finite()) || !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("q, r, R", "need finite q >= 1, r >= 1, R > 0"));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(invalid("z", "shift must be finite"));
    }
    let body = BodySpec::qball(q, r)?;
    let lo: Vec<i64> = z.iter().map(|&v| (v.min(0.0) - radius).floor() as i64 - 1).collect();
    let hi: Vec<i64> = z.iter().map(|&v| (v.max(0.0) + radius).ceil() as i64 + 1).collect();
    let cells = lo.iter().zip(&hi).try_fold(1u64, |a, (l, h)| a.checked_mul((h - l + 1) as u64));
    const CAP: u64 = 1 << 30;
    if cells.is_none_or(|c| c > CAP) {
        return Err(Error::BudgetExceeded { what: "shift enumeration box", limit: CAP as u128 });
    }
    let (mut shifted, mut sym) = (0u64, 0u64);
    let mut y = lo.clone();
    let mut yf = vec![0.0; r];
    let mut v = vec![0.0; r];
    'outer: loop {
        for i in 0..r {
            yf[i] = y[i] as f64;
            v[i] = yf[i] - z[i];
        }
        let in_plain = body.gauge_unchecked(&yf) <= radius + GAUGE_TOL;
        let in_shift = body.gauge_unchecked(&v) <= radius + GAUGE_TOL;
        shifted += in_shift as u64;
        sym += (in_plain != in_shift) as u64;
        for i in (0..r).rev() {
            if y[i] < hi[i] {
                y[i] += 1;
                continue 'outer;
            }
            y[i] = lo[i];
        }
        break;
    }
    let vol = ball_volume(q, r, radius)?.to_f64()?;
    let rf = r as f64;
    let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = rf.powf((q + 1.0) / q) / radius;
    let tail = radius.powf(-1.0 + (q + 1.0) * delta / q);
    let count_bound = vol * s * s.exp();
    let t = rf * zn / radius;
    let sym_bound = 4.0 * std::f64::consts::E * (t * t.exp() + t.exp() * tail) * vol;
    let gates = || {
        vec![
            gate("R >= 1", radius >= 1.0),
            gate("0 < delta < q/(q+1)", delta > 0.0 && delta < q / (q + 1.0)),
            gate("r <= R^delta", rf <= radius.powf(delta)),
        ]
    };
    let p = || params! {"q" => q, "r" => r, "R" => radius, "delta" => delta, "z" => z};
    let lhs = (shifted as f64 - vol).abs();
    Ok(vec![
        VerificationReport::inequality("shift_count", p(), gates(), lhs, count_bound, 1e-9 * count_bound, Oracle::Exact)
            .with_detail(format!(
                "count {shifted}, volume {vol}; weaker form e|B|R^(-1+(q+1)delta/q) = {}",
                std::f64::consts::E * vol * tail
            )),
        VerificationReport::inequality(
            "shift_symmetric_difference",
            p(),
            gates(),
            sym as f64,
            sym_bound,
            1e-9 * sym_bound,
            Oracle::Exact,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(rs: &'a [VerificationReport], name: &str) -> &'a VerificationReport {
        rs.iter().find(|r| r.check_name == name).unwrap()
    }

    #[test]
    fn hanner_equality_cases() {
        let r = check_hanner(2.0, 5, 30.0, 2000, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs);
        // N = 0 forces x = 0, where both sides equal 2‖y‖^q.
        let r = check_hanner(3.0, 4, 0.0, 500, 1).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs);
        for q in [2.5, 3.0, 4.0] {
            assert_eq!(check_hanner(q, 8, 20.0, 5000, 7).unwrap().verdict, Verdict::Pass);
        }
        assert_eq!(check_hanner(1.5, 3, 10.0, 100, 1).unwrap().verdict, Verdict::ReportOnly);
    }

    #[test]
    fn lattice_points_stay_in_ball() {
        let mut rng = stream(1, 1);
        for _ in 0..1000 {
            let x = lattice_point_in_ball(&mut rng, 3.0, 4, 7.5);
            assert!(qnorm_pow(3.0, &x) <= 7.5f64.powi(3));
        }
    }

    #[test]
    fn disc_sandwich() {
        let rs = check_count_volume(2.0, 2, 2.0).unwrap();
        let lo = find(&rs, "count_lower");
        assert_eq!((lo.lhs, lo.rhs), (9.0, 13.0));
        let up = find(&rs, "count_upper");
        let want = std::f64::consts::PI * (2.0 + 2f64.sqrt()).powi(2);
        assert!((up.rhs - want).abs() < 1e-12 * want);
        assert!(rs.iter().all(|r| r.ok()));
    }

    #[test]
    fn interval_chain() {
        let rs = check_count_volume(2.0, 1, 10.0).unwrap();
        let r = find(&rs, "count_vs_dilate");
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.lhs, 21.0);
        let far = find(&rs, "dilate_vs_volume");
        assert!((far.rhs - 2.0 * (9.0f64 / 8.0).exp() * 20.0).abs() < 1e-9);
        let ratio = find(&rs, "volume_count_ratio");
        assert_eq!(ratio.verdict, Verdict::ReportOnly);
        assert!((ratio.lhs - 20.0 / 21.0).abs() < 1e-14);
    }

    #[test]
    fn chain_gate_fails_below_threshold() {
        let rs = check_count_volume(3.0, 4, 1.0).unwrap();
        assert_eq!(find(&rs, "count_vs_dilate").verdict, Verdict::ReportOnly);
        assert_eq!(find(&rs, "count_lower").verdict, Verdict::Pass);
    }

    #[test]
    fn floor_kappa_is_exact() {
        // κ = 4 exactly at N = 8, d = 4, q = 2.
        assert_eq!(floor_kappa(2.0, 4, 8.0).unwrap(), 4);
        assert_eq!(floor_kappa(3.0, 8, 20.0).unwrap(), 10);
        assert_eq!(floor_kappa(3.0, 9, 20.0).unwrap(), 9);
        assert_eq!(floor_kappa(2.0, 3, 40.0).unwrap(), 23);
    }

    #[test]
    fn zero_shift_has_no_difference() {
        let rs = check_shift_difference(2.0, 2, 10.0, 0.5, &[0.0, 0.0]).unwrap();
        assert_eq!(rs[1].lhs, 0.0);
        let rs = check_shift_difference(2.0, 1, 100.0, 0.5, &[0.4]).unwrap();
        assert!(rs[0].lhs < 1e-9);
        assert_eq!(rs[1].lhs, 1.0);
        assert!(rs.iter().all(|r| r.verdict == Verdict::Pass));
    }

    #[test]
    fn disc_shift_by_half() {
        let rs = check_shift_difference(2.0, 2, 30.0, 0.25, &[0.5, 0.5]).unwrap();
        // Brute oracle for the symmetric difference.
        let mut sym = 0;
        for a in -32i64..=32 {
            for b in -32i64..=32 {
                let p = (a * a + b * b) as f64 <= 900.0;
                let s = (a as f64 - 0.5).powi(2) + (b as f64 - 0.5).powi(2) <= 900.0;
                sym += (p != s) as i32;
            }
        }
        assert_eq!(rs[1].lhs, sym as f64);
        assert!(rs.iter().all(|r| r.verdict == Verdict::Pass));
        let out = check_shift_difference(2.0, 2, 1.5, 0.25, &[0.5, 0.5]).unwrap();
        assert!(out.iter().all(|r| r.verdict == Verdict::ReportOnly));
    }
}
