use serde::{Deserialize, Serialize};

/// `q(q-1)…(q-k+1) / k!`, exact for integer `q` while the integer binomial
/// fits in `u128`.
pub fn generalized_binomial(q: f64, k: u64) -> f64 {
    if q.fract() == 0.0 && q >= 0.0 && q <= 1e6 {
        let n = q as u64;
        if k > n {
            return 0.0;
        }
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            match c.checked_mul((n - i) as u128) {
                Some(v) => c = v / (i as u128 + 1),
                None => return float_binomial(q, k),
            }
        }
        return c as f64;
    }
    float_binomial(q, k)
}

fn float_binomial(q: f64, k: u64) -> f64 {
    (0..k).fold(1.0, |c, i| c * (q - i as f64) / (i + 1) as f64)
}

/// A positive series summed to its stopping point, with a certified bound on
/// the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub sum: f64,
    pub tail_bound: f64,
}

impl Series {
    pub fn upper(&self) -> f64 {
        self.sum + self.tail_bound
    }
}

/// `Σ_{n ∈ start + step·N} |binom(q, n)| x^n`. Beyond `n > q` the binomial
/// ratio `|q - n|/(n + 1)` is below 1, so once a term drops under `1e-15`
/// the tail is at most `term · ρ/(1 - ρ)` with `ρ = x^step`.
fn binomial_series(q: f64, start: u64, step: u64, x: f64) -> Series {
    let rho = x.powi(step as i32);
    let mut sum = 0.0;
    let mut n = start;
    loop {
        let term = generalized_binomial(q, n).abs() * x.powi(n as i32);
        sum += term;
        if (n as f64) > q + 1.0 && term < 1e-15 {
            let tail = if q.fract() == 0.0 { 0.0 } else { term * rho / (1.0 - rho) };
            return Series { sum, tail_bound: tail };
        }
        n += step;
    }
}

/// `Σ_{k>=1} |binom(q, 2k)| 2^{-2k}`.
pub fn even_binomial_series(q: f64) -> Series {
    binomial_series(q, 2, 2, 0.5)
}

/// `max{Σ_{k>=1} |binom(q, 2k)| 2^{-2k}, (3/2)^q}`, with the series taken at
/// its certified upper end.
pub fn c_tilde(q: f64) -> f64 {
    even_binomial_series(q).upper().max(1.5f64.powf(q))
}

/// `1 + (3/2)^q + q`.
pub fn a_q(q: f64) -> f64 {
    1.0 + 1.5f64.powf(q) + q
}

/// `Σ_{k>=2} |binom(q, k)| 2^{-k+1}`.
pub fn slice_series(q: f64) -> Series {
    let s = binomial_series(q, 2, 1, 0.5);
    Series {
        sum: 2.0 * s.sum,
        tail_bound: 2.0 * s.tail_bound,
    }
}

/// `(A_q + Σ_{k>=2} |binom(q, k)| 2^{-k+1}) a^{-1} d^{-1+2/q}`; the slice
/// bound needs this at most `1/2`.
pub fn slice_threshold(q: f64, a: f64, d: usize) -> f64 {
    (a_q(q) + slice_series(q).upper()) / a * (d as f64).powf(-1.0 + 2.0 / q)
}
