use statrs::function::gamma::ln_gamma;

use super::average::convolve_axis;
use crate::error::{invalid, Error, Result};
use crate::function::LatticeFunction;

/// Largest inversion grid tried before giving up.
pub const MAX_GRID: usize = 1 << 16;
/// Mass allowed outside the trimmed kernel.
pub const TAIL_MASS: f64 = 1e-12;

/// The one-dimensional heat kernel with multiplier `e^{-t sin²(πθ)}`,
/// supported on `[-radius, radius]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatKernel {
    pub t: f64,
    pub radius: i64,
    pub weights: Vec<f64>,
    /// Size of the periodic grid used for the inversion.
    pub grid: usize,
}

impl HeatKernel {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("need finite t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Self {
                t,
                radius: 0,
                weights: vec![1.0],
                grid: 1,
            });
        }
        let m = grid_size(t)?;
        let half = m / 4;
        let mult: Vec<f64> = (0..m)
            .map(|j| {
                let s = (std::f64::consts::PI * j as f64 / m as f64).sin();
                (-t * s * s).exp()
            })
            .collect();
        let cos: Vec<f64> = (0..m)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / m as f64).cos())
            .collect();
        let mut k: Vec<f64> = (0..=half)
            .map(|n| {
                let s: f64 = (0..m).map(|j| mult[j] * cos[(j * n) % m]).sum();
                (s / m as f64).max(0.0)
            })
            .collect();
        // Trim the two-sided tail below TAIL_MASS.
        let mut tail = 0.0;
        let mut r = half;
        while r > 0 && tail + 2.0 * k[r] < TAIL_MASS {
            tail += 2.0 * k[r];
            r -= 1;
        }
        k.truncate(r + 1);
        let mut weights: Vec<f64> = k.iter().rev().cloned().collect();
        weights.extend_from_slice(&k[1..]);
        Ok(Self {
            t,
            radius: r as i64,
            weights,
            grid: m,
        })
    }

    pub fn at(&self, n: i64) -> f64 {
        if n.abs() > self.radius {
            0.0
        } else {
            self.weights[(n + self.radius) as usize]
        }
    }
}

/// Smallest power of two `M >= 16` with `e^{-t/2} (t/2)^{M/4} / (M/4)! < 1e-14`
/// and `M/4 >= t/2`. The second condition keeps `M/4` in the decreasing tail
/// of the Poisson weights; without it every small `M` passes for large `t`.
pub fn grid_size(t: f64) -> Result<usize> {
    let target = 1e-14f64.ln();
    let mut m = 16usize;
    while m <= MAX_GRID {
        let k = (m / 4) as f64;
        let ln_term = if k < t / 2.0 {
            0.0
        } else if t > 0.0 {
            -t / 2.0 + k * (t / 2.0).ln() - ln_gamma(k + 1.0)
        } else {
            f64::NEG_INFINITY
        };
        if ln_term < target {
            return Ok(m);
        }
        m *= 2;
    }
    Err(Error::BudgetExceeded {
        what: "semigroup inversion grid",
        limit: MAX_GRID as u128,
    })
}

/// `P_t f`: convolution with the `d`-fold tensor power of the heat kernel.
pub fn semigroup_apply(t: f64, f: &LatticeFunction) -> Result<LatticeFunction> {
    let kernel = HeatKernel::new(t)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let mut g = f.clone();
    for axis in 0..f.dim() {
        g = convolve_axis(&g, axis, &kernel.weights, kernel.radius)?;
    }
    Ok(g)
}
