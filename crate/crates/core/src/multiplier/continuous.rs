use std::f64::consts::PI;

use quadrature::double_exponential::integrate;

use crate::error::{invalid, Error, Result};
use crate::geometry::ball_volume;

/// Absolute tolerance of the whole integral.
const TOL: f64 = 1e-9;

/// `∫_{-w}^{w} cos(2π a y) dy`.
fn cos_interval(a: f64, w: f64) -> f64 {
    let z = 2.0 * PI * a * w;
    if z.abs() < 1e-8 {
        2.0 * w * (1.0 - z * z / 6.0)
    } else {
        2.0 * (z).sin() / (2.0 * PI * a)
    }
}

/// `(R^q - s)^{1/q}`, clamped at zero.
fn section(q: f64, rq: f64, s: f64) -> f64 {
    (rq - s).max(0.0).powf(1.0 / q)
}

/// Integral over `[0, b]`, split into pieces no longer than a quarter period
/// of the fastest oscillation so the double-exponential rule converges.
fn integrate_split(f: &dyn Fn(f64) -> f64, b: f64, freq: f64, tol: f64, err: &mut f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let pieces = ((4.0 * freq * b).ceil() as usize).max(1);
    let h = b / pieces as f64;
    (0..pieces)
        .map(|i| {
            let out = integrate(f, i as f64 * h, (i + 1) as f64 * h, tol / pieces as f64);
            *err += out.error_estimate;
            out.integral
        })
        .sum()
}

/// `|B_R^q|^{-1} ∫_{B_R^q} e^{2πi ξ·y} dy` for `d = ξ.len() <= 3`.
///
/// The integrand is even in every coordinate, so the integral is `2^d` times
/// the cosine integral over the positive orthant; the last coordinate is
/// integrated in closed form and the others by nested quadrature.
pub fn continuous_multiplier(q: f64, radius: f64, xi: &[f64]) -> Result<f64> {
    let d = xi.len();
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!("continuous multiplier needs 1 <= d <= 3, got {d}")));
    }
    if !(q >= 1.0) || !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("q, R", "need q >= 1 and R > 0"));
    }
    if xi.iter().all(|&x| x == 0.0) {
        return Ok(1.0);
    }
    let vol = ball_volume(q, d, radius)?.to_f64()?;
    let freq = xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut err = 0.0;
    let rq = if q.is_infinite() { 1.0 } else { radius.powf(q) };
    let width = |s: f64| if q.is_infinite() { radius } else { section(q, rq, s) };
    let tq = |y: f64| if q.is_infinite() { 0.0 } else { y.powf(q) };
    let total = match d {
        1 => cos_interval(xi[0], radius),
        2 => {
            let f = |y1: f64| (2.0 * PI * xi[0] * y1).cos() * cos_interval(xi[1], width(tq(y1)));
            2.0 * integrate_split(&f, radius, freq, TOL * vol / 4.0, &mut err)
        }
        _ => {
            // Largest inner error estimate; the outer factor is at most 4 on
            // an interval of length R.
            let inner_err = std::cell::Cell::new(0.0f64);
            let f = |y1: f64| {
                let s1 = tq(y1);
                let g = |y2: f64| {
                    2.0 * (2.0 * PI * xi[1] * y2).cos() * cos_interval(xi[2], width(s1 + tq(y2)))
                };
                let mut e = 0.0;
                let v = integrate_split(&g, width(s1), freq, TOL * vol / (16.0 * radius), &mut e);
                inner_err.set(inner_err.get().max(e));
                2.0 * (2.0 * PI * xi[0] * y1).cos() * v
            };
            let v = integrate_split(&f, radius, freq, TOL * vol / 8.0, &mut err);
            err += 4.0 * radius * inner_err.get();
            v
        }
    };
    let m = total / vol;
    let err = err / vol;
    if !(err <= TOL) || !m.is_finite() {
        return Err(Error::Quadrature { estimate: err, target: TOL });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J_1` by its power series, adequate for `|x| <= 20`.
    fn bessel_j1(x: f64) -> f64 {
        let mut term = x / 2.0;
        let mut sum = term;
        for k in 1..80 {
            term *= -(x * x / 4.0) / (k as f64 * (k + 1) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn interval_closed_form() {
        assert_eq!(continuous_multiplier(2.0, 1.0, &[0.0]).unwrap(), 1.0);
        for xi in [0.1, 0.37, 1.2] {
            let want = (2.0 * PI * xi).sin() / (2.0 * PI * xi);
            assert!((continuous_multiplier(2.0, 1.0, &[xi]).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn disc_matches_bessel() {
        for (r, xi) in [(1.0f64, [0.6f64, 0.8]), (2.0, [0.3, -0.1]), (1.0, [1.5, 0.2])] {
            let z: f64 = 2.0 * PI * r * (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            let want = 2.0 * bessel_j1(z) / z;
            let got = continuous_multiplier(2.0, r, &xi).unwrap();
            assert!((got - want).abs() < 1e-9, "{got} {want}");
        }
    }

    #[test]
    fn disc_matches_riemann_grid() {
        // Polar grid on the unit disc, |ξ| = 1: midpoint rule in r, uniform
        // (spectrally accurate) rule in θ.
        let xi: [f64; 2] = [0.6, 0.8];
        let (nr, nt) = (4000, 256);
        let mut s = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..nt {
                let th = 2.0 * PI * j as f64 / nt as f64;
                s += (2.0 * PI * r * (xi[0] * th.cos() + xi[1] * th.sin())).cos() * r;
            }
        }
        let oracle = s * (2.0 * PI / nt as f64) / nr as f64 / PI;
        let got = continuous_multiplier(2.0, 1.0, &xi).unwrap();
        assert!((got - oracle).abs() < 1e-6, "{got} {oracle}");
    }

    #[test]
    fn cube_and_ball_in_three_dimensions() {
        let xi = [0.2, -0.1, 0.15];
        let want: f64 = xi.iter().map(|&x: &f64| (2.0 * PI * x * 2.0).sin() / (2.0 * PI * x * 2.0)).product();
        assert!((continuous_multiplier(f64::INFINITY, 2.0, &xi).unwrap() - want).abs() < 1e-9);
        // Euclidean ball: 3 (sin z - z cos z) / z³.
        let z = 2.0 * PI * 1.5 * (xi.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let want = 3.0 * (z.sin() - z * z.cos()) / z.powi(3);
        assert!((continuous_multiplier(2.0, 1.5, &xi).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn rejects_high_dimension() {
        assert!(continuous_multiplier(2.0, 1.0, &[0.1; 4]).is_err());
    }
}
