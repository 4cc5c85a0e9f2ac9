use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::function::{cell_count, strides, GridFunction};
use crate::geometry::{BodyKind, BodySpec};

/// Grid samples are read as piecewise constant on cells
/// `n·h + [-h/2, h/2]^d`. The kernel weight of offset `m` is the fraction of
/// `G_t` inside cell `m`: exact for the cube, midpoint-subsampled on
/// boundary cells otherwise.
#[derive(Clone, Debug)]
pub struct GridKernel {
    pub radius: Vec<i64>,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GridAverage {
    pub values: GridFunction,
    /// Error bound per unit Lipschitz constant of `F`.
    pub error_per_lipschitz: f64,
}

fn half_widths(body: &BodySpec, t: f64) -> Vec<f64> {
    match body.kind() {
        BodyKind::Ellipsoid { weights } => weights.iter().map(|w| t / w).collect(),
        _ => vec![t; body.dim()],
    }
}

/// Length of `[-a, a] ∩ [c - h/2, c + h/2]`.
fn overlap(a: f64, c: f64, h: f64) -> f64 {
    ((c + h / 2.0).min(a) - (c - h / 2.0).max(-a)).max(0.0)
}

impl GridKernel {
    pub fn new(body: &BodySpec, t: f64, h: f64) -> Result<Self> {
        if !(t > 0.0 && h > 0.0) {
            return Err(invalid("t, h", "need t > 0 and h > 0"));
        }
        let d = body.dim();
        let a = half_widths(body, t);
        let radius: Vec<i64> = a.iter().map(|ai| (ai / h + 0.5).ceil() as i64).collect();
        let shape: Vec<usize> = radius.iter().map(|r| (2 * r + 1) as usize).collect();
        let n = cell_count(&shape)?;
        let st = strides(&shape);
        let sub = subsamples(d);
        let weights: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let m: Vec<i64> = (0..d).map(|k| ((i / st[k]) % shape[k]) as i64 - radius[k]).collect();
                match body.kind() {
                    BodyKind::Cube => (0..d).map(|k| overlap(a[k], m[k] as f64 * h, h)).product(),
                    _ => cell_fraction(body, t, h, &m, sub) * h.powi(d as i32),
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(invalid("h", "mesh too coarse: kernel has no mass"));
        }
        Ok(Self {
            radius,
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }
}

fn subsamples(d: usize) -> usize {
    ((4096f64).powf(1.0 / d as f64).floor() as usize).clamp(2, 32)
}

/// Fraction of cell `m` inside `G_t`.
fn cell_fraction(body: &BodySpec, t: f64, h: f64, m: &[i64], sub: usize) -> f64 {
    let d = m.len();
    // The gauge is monotone in each |x_i|, so the cell's extreme gauges sit
    // at its nearest and farthest corners.
    let near: Vec<f64> = m.iter().map(|&k| ((k.abs() as f64 - 0.5) * h).max(0.0)).collect();
    let far: Vec<f64> = m.iter().map(|&k| (k.abs() as f64 + 0.5) * h).collect();
    if body.gauge_unchecked(&far) <= t {
        return 1.0;
    }
    if body.gauge_unchecked(&near) > t {
        return 0.0;
    }
    let total = sub.pow(d as u32);
    let mut x = vec![0.0; d];
    let mut inside = 0usize;
    for s in 0..total {
        let mut r = s;
        for k in 0..d {
            let j = r % sub;
            r /= sub;
            x[k] = (m[k] as f64 - 0.5 + (j as f64 + 0.5) / sub as f64) * h;
        }
        if body.gauge_unchecked(&x) <= t {
            inside += 1;
        }
    }
    inside as f64 / total as f64
}

fn check(body: &BodySpec, f: &GridFunction) -> Result<()> {
    if body.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: f.dim(),
        });
    }
    Ok(())
}

/// Riemann-sum approximation of `|G_t|^{-1} ∫_{G_t} F(x - y) dy` on the grid.
pub fn continuous_average_grid(body: &BodySpec, t: f64, f: &GridFunction) -> Result<GridAverage> {
    check(body, f)?;
    let h = f.mesh();
    let values = if body.dim() == 1 {
        let a = half_widths(body, t)[0];
        let r = (a / h + 0.5).ceil() as i64;
        let line = Line::new(f);
        let off = f.offset()[0] - r;
        let n = f.shape()[0] + 2 * r as usize;
        let v = (0..n)
            .map(|i| line.average((off + i as i64) as f64 * h, a))
            .collect();
        GridFunction::from_parts(vec![off], vec![n], h, v)
    } else {
        let k = GridKernel::new(body, t, h)?;
        convolve(f, &k)?
    };
    Ok(GridAverage {
        values,
        error_per_lipschitz: h * (body.dim() as f64).sqrt(),
    })
}

/// `max_t |A_t F|` over `scales`, on the grid dilated by the largest kernel.
pub fn continuous_maximal_grid(body: &BodySpec, scales: &[f64], f: &GridFunction) -> Result<GridFunction> {
    check(body, f)?;
    let t_max = scales.iter().cloned().fold(f64::NAN, f64::max);
    if scales.is_empty() || !(t_max > 0.0) {
        return Err(Error::EmptyScales);
    }
    let h = f.mesh();
    if body.dim() == 1 {
        let line = Line::new(f);
        let halves: Vec<f64> = scales.iter().map(|&t| half_widths(body, t)[0]).collect();
        let r = (half_widths(body, t_max)[0] / h + 0.5).ceil() as i64;
        let off = f.offset()[0] - r;
        let n = f.shape()[0] + 2 * r as usize;
        let v = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = (off + i as i64) as f64 * h;
                halves.iter().fold(0.0f64, |m, &a| m.max(line.average(x, a).abs()))
            })
            .collect();
        return Ok(GridFunction::from_parts(vec![off], vec![n], h, v));
    }
    let kmax = GridKernel::new(body, t_max, h)?;
    let mut best = convolve(f, &kmax)?;
    for v in best.values_mut() {
        *v = v.abs();
    }
    for &t in scales {
        let a = convolve(f, &GridKernel::new(body, t, h)?)?;
        for (i, &v) in a.values().iter().enumerate() {
            let n = a.node(i);
            let j = best.index_of(&n).expect("largest kernel covers");
            let slot = &mut best.values_mut()[j];
            *slot = slot.max(v.abs());
        }
    }
    Ok(best)
}

/// Cumulative integral of a one-dimensional piecewise-constant grid function.
pub(crate) struct Line<'a> {
    f: &'a GridFunction,
    cum: Vec<f64>,
    left: f64,
}

impl<'a> Line<'a> {
    pub(crate) fn new(f: &'a GridFunction) -> Self {
        let h = f.mesh();
        let mut cum = vec![0.0; f.len() + 1];
        for (i, v) in f.values().iter().enumerate() {
            cum[i + 1] = cum[i] + v * h;
        }
        Self {
            f,
            cum,
            left: (f.offset()[0] as f64 - 0.5) * h,
        }
    }

    /// `∫_{-∞}^{x} F`.
    pub(crate) fn integral(&self, x: f64) -> f64 {
        let h = self.f.mesh();
        let u = (x - self.left) / h;
        if u <= 0.0 {
            return 0.0;
        }
        let n = self.f.len();
        if u >= n as f64 {
            return self.cum[n];
        }
        let j = u.floor() as usize;
        self.cum[j] + self.f.values()[j] * (u - j as f64) * h
    }

    /// `(2a)^{-1} ∫_{x-a}^{x+a} F`.
    pub(crate) fn average(&self, x: f64, a: f64) -> f64 {
        (self.integral(x + a) - self.integral(x - a)) / (2.0 * a)
    }
}

/// Full convolution of grid samples with a grid kernel.
fn convolve(f: &GridFunction, k: &GridKernel) -> Result<GridFunction> {
    let d = f.dim();
    let off: Vec<i64> = f.offset().iter().zip(&k.radius).map(|(o, r)| o - r).collect();
    let shape: Vec<usize> = f.shape().iter().zip(&k.radius).map(|(s, r)| s + 2 * *r as usize).collect();
    let n = cell_count(&shape)?;
    let kshape: Vec<usize> = k.radius.iter().map(|r| (2 * r + 1) as usize).collect();
    let kst = strides(&kshape);
    let ost = strides(&shape);
    let nz: Vec<(Vec<i64>, f64)> = k
        .weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(i, &w)| {
            let m = (0..d).map(|j| ((i / kst[j]) % kshape[j]) as i64 - k.radius[j]).collect();
            (m, w)
        })
        .collect();
    let v: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let node: Vec<i64> = (0..d).map(|j| off[j] + ((i / ost[j]) % shape[j]) as i64).collect();
            let mut z = vec![0i64; d];
            let mut s = 0.0;
            for (m, w) in &nz {
                for j in 0..d {
                    z[j] = node[j] - m[j];
                }
                s += w * f.get(&z);
            }
            s
        })
        .collect();
    Ok(GridFunction::from_parts(off, shape, f.mesh(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_fixed_in_the_interior() {
        for body in [BodySpec::cube(2), BodySpec::qball(2.0, 2).unwrap(), BodySpec::cube(1)] {
            let d = body.dim();
            let f = GridFunction::sample(d, -2.0, 2.0, 0.1, |_| 1.0).unwrap();
            let a = continuous_average_grid(&body, 0.5, &f).unwrap().values;
            assert!((a.at(&vec![0.0; d]).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parabola_average() {
        let h = 0.01;
        let f = GridFunction::sample(1, -3.0, 3.0, h, |x| x[0] * x[0]).unwrap();
        let a = continuous_average_grid(&BodySpec::cube(1), 1.0, &f).unwrap().values;
        // Cells tile [-1, 1] with half cells at the ends: trapezoid rule.
        let want = 1.0 / 3.0 + h * h / 6.0;
        assert!((a.at(&[0.0]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn small_scale_reproduces_samples() {
        let f = GridFunction::sample(1, -1.0, 1.0, 0.05, |x| (1.0 - x[0].abs()).max(0.0)).unwrap();
        let a = continuous_average_grid(&BodySpec::cube(1), 0.01, &f).unwrap().values;
        for i in 0..f.len() {
            let x = f.position(i);
            assert!((a.at(&x).unwrap() - f.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn line_path_matches_kernel_path() {
        let f = GridFunction::sample(1, -1.0, 1.0, 0.1, |x| x[0].sin() + 2.0).unwrap();
        let body = BodySpec::cube(1);
        for t in [0.25, 0.3, 0.77] {
            let a = continuous_average_grid(&body, t, &f).unwrap().values;
            let b = convolve(&f, &GridKernel::new(&body, t, 0.1).unwrap()).unwrap();
            for i in 0..b.len() {
                assert!((a.get(&b.node(i)) - b.values()[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn disc_kernel_mass_close_to_area() {
        let k = GridKernel::new(&BodySpec::qball(2.0, 2).unwrap(), 1.0, 0.05).unwrap();
        assert!((k.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximal_dominates_each_average() {
        let f = GridFunction::sample(2, -1.0, 1.0, 0.25, |x| (x[0] + x[1]).cos()).unwrap();
        let body = BodySpec::cube(2);
        let scales = [0.25, 0.5, 1.0];
        let m = continuous_maximal_grid(&body, &scales, &f).unwrap();
        for &t in &scales {
            let a = continuous_average_grid(&body, t, &f).unwrap().values;
            for i in 0..a.len() {
                assert!(m.get(&a.node(i)) >= a.values()[i].abs() - 1e-15);
            }
        }
    }
}
