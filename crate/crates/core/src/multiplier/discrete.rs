use std::f64::consts::PI;

use super::frequency::FrequencyPoint;
use crate::error::{invalid, Error, Result};
use crate::function::LatticeFunction;
use crate::geometry::{big_to_f64, int_budget, lattice_count, BodyKind, BodySpec, LatticeBall};

/// Largest `dim × (budget + 1)` table of the integer-exponent recursion.
const TABLE_CAP: usize = 1 << 27;

/// Precomputed data for `𝔪_N(ξ) = |G_N ∩ Z^d|^{-1} Σ_{x ∈ G_N ∩ Z^d} e^{2πi ξ·x}`
/// at one body and radius, to be evaluated at many frequencies.
///
/// The sum is real: pairing `x` with its sign flips turns it into
/// `Σ_{x ≥ 0} 2^{#{x_j ≠ 0}} Π_j cos(2π x_j ξ_j)`. The cube factorises into
/// Dirichlet kernels; integer `q` runs the recursion over exact power sums
/// `g_r[s] = Σ_k w_k cos(2π k ξ_r) g_{r-1}[s - k^q]`; other bodies sum over
/// the nonnegative orthant.
#[derive(Clone, Debug)]
pub struct MultiplierPlan {
    dim: usize,
    count: f64,
    kind: PlanKind,
}

#[derive(Clone, Debug)]
enum PlanKind {
    Cube { r: i64 },
    IntPow { q: u32, budget: u64 },
    Orthant { points: Vec<i64>, weights: Vec<f64>, kmax: i64 },
}

impl MultiplierPlan {
    pub fn new(body: &BodySpec, n: f64) -> Result<Self> {
        let dim = body.dim();
        let count = lattice_count(body, n)?;
        if count.count == 0u32.into() {
            return Err(invalid("N", "no lattice points in the body"));
        }
        let kind = match (body.kind(), body.integer_q()) {
            (BodyKind::Cube, _) => PlanKind::Cube {
                r: body.box_radius(n)[0],
            },
            (BodyKind::QBall { .. }, Some(q)) => {
                let budget = int_budget(n, q)?;
                let cells = (budget as usize).checked_add(1).and_then(|b| b.checked_mul(dim));
                if cells.is_none_or(|c| c > TABLE_CAP) {
                    return Err(Error::BudgetExceeded {
                        what: "multiplier recursion table",
                        limit: TABLE_CAP as u128,
                    });
                }
                PlanKind::IntPow { q, budget }
            }
            _ => {
                let ball = LatticeBall::new(body, n)?;
                let (mut points, mut weights) = (Vec::new(), Vec::new());
                let mut kmax = 0i64;
                ball.for_each_nonneg(&mut |x| {
                    points.extend_from_slice(x);
                    kmax = kmax.max(*x.iter().max().unwrap_or(&0));
                    weights.push(x.iter().fold(1.0, |w, &v| if v != 0 { 2.0 * w } else { w }));
                });
                PlanKind::Orthant { points, weights, kmax }
            }
        };
        Ok(Self {
            dim,
            count: big_to_f64(&count.count),
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|G_N ∩ Z^d|` as a float.
    pub fn count(&self) -> f64 {
        self.count
    }

    pub fn eval(&self, xi: &FrequencyPoint) -> Result<f64> {
        if xi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.dim(),
            });
        }
        let v = match &self.kind {
            PlanKind::Cube { r } => xi.xi().iter().map(|&x| dirichlet(*r, x)).product(),
            PlanKind::IntPow { q, budget } => {
                shell_sums(*q, xi.xi(), *budget).iter().sum::<f64>() / self.count
            }
            PlanKind::Orthant { points, weights, kmax } => {
                let tables: Vec<Vec<f64>> = xi.xi().iter().map(|&x| cos_table(*kmax, x)).collect();
                let s: f64 = points
                    .chunks_exact(self.dim)
                    .zip(weights)
                    .map(|(p, w)| w * p.iter().zip(&tables).map(|(&k, t)| t[k as usize]).product::<f64>())
                    .sum();
                s / self.count
            }
        };
        Ok(v.clamp(-1.0, 1.0))
    }
}

/// `cos(2π k x)` for `k = 0..=kmax`.
fn cos_table(kmax: i64, x: f64) -> Vec<f64> {
    (0..=kmax.max(0)).map(|k| (2.0 * PI * k as f64 * x).cos()).collect()
}

/// `(2r + 1)^{-1} Σ_{|k| <= r} cos(2π k x)`.
fn dirichlet(r: i64, x: f64) -> f64 {
    let t = cos_table(r, x);
    (1.0 + 2.0 * t[1..].iter().sum::<f64>()) / (2 * r + 1) as f64
}

/// `g[s] = Σ_{x ∈ Z^r, Σ|x_j|^q = s} e^{2πi ξ·x}` for `s = 0..=smax`, where
/// `r = ξ.len()`. At `ξ = 0` this is the shell count.
pub(crate) fn shell_sums(q: u32, xi: &[f64], smax: u64) -> Vec<f64> {
    let n = smax as usize + 1;
    let powers: Vec<usize> = (0..)
        .map(|k: u64| k.pow(q) as usize)
        .take_while(|&p| p < n)
        .collect();
    let mut g = vec![0.0; n];
    g[0] = 1.0;
    let mut next = vec![0.0; n];
    for &x in xi {
        let c: Vec<f64> = (0..powers.len())
            .map(|k| if k == 0 { 1.0 } else { 2.0 * (2.0 * PI * k as f64 * x).cos() })
            .collect();
        next.iter_mut().for_each(|v| *v = 0.0);
        for (s, &gs) in g.iter().enumerate() {
            if gs == 0.0 {
                continue;
            }
            for (k, &p) in powers.iter().enumerate() {
                if s + p >= n {
                    break;
                }
                next[s + p] += c[k] * gs;
            }
        }
        std::mem::swap(&mut g, &mut next);
    }
    g
}

pub fn multiplier(body: &BodySpec, n: f64, xi: &FrequencyPoint) -> Result<f64> {
    MultiplierPlan::new(body, n)?.eval(xi)
}

/// The multiplier of the `q`-ball in dimension `r` at radius `R`.
pub fn lower_dim_multiplier(q: f64, r: usize, radius: f64, eta: &FrequencyPoint) -> Result<f64> {
    multiplier(&BodySpec::qball(q, r)?, radius, eta)
}

/// `e^{-t Σ sin²(π ξ_i)}`.
pub fn semigroup_multiplier(t: f64, xi: &FrequencyPoint) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("need finite t >= 0, got {t}")));
    }
    let s: f64 = xi.xi().iter().map(|&x| (PI * x).sin().powi(2)).sum();
    Ok((-t * s).exp())
}

/// `Σ_x f(x) e^{2πi ξ·x}` as `(re, im)`, summed directly.
pub fn fourier_transform(f: &LatticeFunction, xi: &FrequencyPoint) -> Result<(f64, f64)> {
    if xi.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: xi.dim(),
        });
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (x, v) in f.iter() {
        if v == 0.0 {
            continue;
        }
        let phase = 2.0 * PI * x.iter().zip(xi.xi()).map(|(&k, &e)| k as f64 * e).sum::<f64>();
        re += v * phase.cos();
        im += v * phase.sin();
    }
    Ok((re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lattice_points;
    use crate::operators::{average, semigroup_apply};

    fn brute(body: &BodySpec, n: f64, xi: &FrequencyPoint) -> f64 {
        let pts = lattice_points(body, n).unwrap();
        let s: f64 = pts
            .iter()
            .map(|x| (2.0 * PI * x.iter().zip(xi.xi()).map(|(&k, &e)| k as f64 * e).sum::<f64>()).cos())
            .sum();
        s / pts.len() as f64
    }

    #[test]
    fn documented_values() {
        let cube = BodySpec::cube(1);
        assert_eq!(multiplier(&cube, 5.0, &FrequencyPoint::zero(1)).unwrap(), 1.0);
        let v = multiplier(&cube, 1.0, &FrequencyPoint::new(vec![0.5])).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
        let disc = BodySpec::qball(2.0, 2).unwrap();
        assert_eq!(MultiplierPlan::new(&disc, 2.0).unwrap().count(), 13.0);
        for seed in 0..20 {
            let xi = super::super::sample_frequency(2, 4, seed);
            assert!((multiplier(&disc, 2.0, &xi).unwrap() - brute(&disc, 2.0, &xi)).abs() < 1e-13);
        }
    }

    #[test]
    fn every_body_matches_enumeration() {
        let bodies = [
            BodySpec::cube(3),
            BodySpec::qball(1.0, 3).unwrap(),
            BodySpec::qball(3.0, 3).unwrap(),
            BodySpec::qball(2.5, 3).unwrap(),
            BodySpec::ellipsoid(vec![1.0, 1.2, 1.4]).unwrap(),
        ];
        for body in &bodies {
            for (i, n) in [0.0, 1.0, 2.5, 4.0].iter().enumerate() {
                let plan = MultiplierPlan::new(body, *n).unwrap();
                for s in 0..10 {
                    let xi = super::super::sample_frequency(3, i as u64, s);
                    let got = plan.eval(&xi).unwrap();
                    assert!((got - brute(body, *n, &xi)).abs() < 1e-12, "{body:?} {n}");
                }
            }
        }
    }

    #[test]
    fn matches_transform_of_average_kernel() {
        let body = BodySpec::qball(2.0, 2).unwrap();
        let avg = average(&body, 3.0, &LatticeFunction::delta(2)).unwrap();
        let xi = FrequencyPoint::new(vec![0.13, -0.31]);
        let (re, im) = fourier_transform(&avg, &xi).unwrap();
        assert!((re - multiplier(&body, 3.0, &xi).unwrap()).abs() < 1e-13);
        assert!(im.abs() < 1e-13);
    }

    #[test]
    fn semigroup_values() {
        let h = FrequencyPoint::new(vec![0.5]);
        assert_eq!(semigroup_multiplier(0.0, &h).unwrap(), 1.0);
        assert!((semigroup_multiplier(1.0, &h).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let xi = FrequencyPoint::new(vec![0.2, -0.1, 0.4]);
        let k = semigroup_apply(10.0, &LatticeFunction::delta(3)).unwrap();
        let (re, _) = fourier_transform(&k, &xi).unwrap();
        assert!((re - semigroup_multiplier(10.0, &xi).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn lower_dim_degenerate_reduction() {
        let xi = FrequencyPoint::new(vec![0.1, 0.2, 0.3]);
        let a = lower_dim_multiplier(3.0, 3, 4.0, &xi).unwrap();
        let b = multiplier(&BodySpec::qball(3.0, 3).unwrap(), 4.0, &xi).unwrap();
        assert_eq!(a, b);
        assert_eq!(lower_dim_multiplier(2.0, 2, 3.0, &FrequencyPoint::zero(2)).unwrap(), 1.0);
    }

    #[test]
    fn shell_sums_at_zero_are_counts() {
        let g = shell_sums(2, &[0.0, 0.0], 5);
        assert_eq!(g, vec![1.0, 4.0, 4.0, 0.0, 4.0, 8.0]);
    }
}
