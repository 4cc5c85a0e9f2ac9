use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::stream;

/// A point of the torus `T^d`, stored in `[-1/2, 1/2)^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint {
    xi: Vec<f64>,
    torus_norm_sq: f64,
}

/// `x mod 1` in `[-1/2, 1/2)`.
fn reduce(x: f64) -> f64 {
    let r = x - (x + 0.5).floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

impl FrequencyPoint {
    pub fn new(xi: Vec<f64>) -> Self {
        let xi: Vec<f64> = xi.into_iter().map(reduce).collect();
        let torus_norm_sq = xi.iter().map(|v| v * v).sum();
        Self { xi, torus_norm_sq }
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![0.0; d])
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `‖ξ‖² = Σ dist(ξ_j, Z)²`.
    pub fn torus_norm_sq(&self) -> f64 {
        self.torus_norm_sq
    }

    pub fn torus_norm(&self) -> f64 {
        self.torus_norm_sq.sqrt()
    }

    /// The first `r` coordinates.
    pub fn head(&self, r: usize) -> Self {
        Self::new(self.xi[..r].to_vec())
    }
}

/// Sample `index` of the frequency measure used by the checks: even indices
/// are uniform on the torus; odd indices lie on a random direction at a
/// log-uniform distance in `[1e-4, 1/2]`, which resolves the transition at
/// `‖ξ‖ ≈ 1/κ`.
pub fn sample_frequency(d: usize, seed: u64, index: u64) -> FrequencyPoint {
    let mut rng = stream(seed, index);
    if index % 2 == 0 {
        return FrequencyPoint::new((0..d).map(|_| rng.random_range(-0.5..0.5)).collect());
    }
    let (lo, hi) = (1e-4f64.ln(), 0.5f64.ln());
    let rho = (lo + rng.random::<f64>() * (hi - lo)).exp();
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 {
            return FrequencyPoint::new(g.iter().map(|v| rho * v / n).collect());
        }
    }
}
