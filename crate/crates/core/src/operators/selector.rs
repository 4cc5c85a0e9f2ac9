use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{BodySpec, ScaleShells, GAUGE_TOL};

/// The dilation scales a maximal operator ranges over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ScaleSelector {
    /// Every `t ∈ (0, t_max]`.
    All { t_max: f64 },
    /// Every `t ∈ (D, t_max]`.
    GreaterThan { d: f64, t_max: f64 },
    /// Dyadic `N = 2^n` with `c1·d^{1/q} <= N <= c2·d`.
    DyadicWindow { c1: f64, c2: f64 },
    Explicit { scales: Vec<f64> },
}

/// Dyadic numbers `2^n, n ∈ Z`, in `[c1·d^{1/q}, c2·d]`. `q = ∞` reads
/// `d^{1/q}` as 1.
pub fn dyadic_window(q: f64, d: usize, c1: f64, c2: f64) -> Result<Vec<f64>> {
    if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
        return Err(invalid("C1, C2", "window constants must be positive and finite"));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    let df = d as f64;
    let lo = if q.is_infinite() { c1 } else { c1 * df.powf(1.0 / q) };
    let hi = c2 * df;
    let mut n = lo.log2().floor() as i32 - 1;
    let mut out = Vec::new();
    loop {
        let v = 2f64.powi(n);
        if v > hi {
            break;
        }
        if v >= lo {
            out.push(v);
        }
        n += 1;
    }
    Ok(out)
}

impl ScaleSelector {
    /// The nominal scales (before reduction to breakpoints) and the largest
    /// scale needed.
    pub fn expand(&self, body: &BodySpec) -> Result<(Vec<f64>, f64)> {
        match self {
            ScaleSelector::All { t_max } => {
                check_positive("t_max", *t_max)?;
                Ok((Vec::new(), *t_max))
            }
            ScaleSelector::GreaterThan { d, t_max } => {
                if !(*d >= 0.0) {
                    return Err(invalid("D", format!("need D >= 0, got {d}")));
                }
                check_positive("t_max", *t_max)?;
                if t_max <= d {
                    return Err(Error::EmptyScales);
                }
                Ok((Vec::new(), *t_max))
            }
            ScaleSelector::DyadicWindow { c1, c2 } => {
                let q = body.exponent();
                let w = dyadic_window(q, body.dim(), *c1, *c2)?;
                match w.last() {
                    Some(&m) => Ok((w, m)),
                    None => Err(Error::EmptyWindow {
                        c1: *c1,
                        c2: *c2,
                        d: body.dim(),
                        q,
                    }),
                }
            }
            ScaleSelector::Explicit { scales } => {
                if scales.is_empty() {
                    return Err(Error::EmptyScales);
                }
                for &t in scales {
                    check_positive("scale", t)?;
                }
                let m = scales.iter().cloned().fold(0.0, f64::max);
                Ok((scales.clone(), m))
            }
        }
    }

    /// Breakpoint indices of `shells` realised by this selector, ascending.
    pub fn select(&self, body: &BodySpec, shells: &ScaleShells) -> Result<Vec<usize>> {
        let (nominal, _) = self.expand(body)?;
        let mut idx: Vec<usize> = match self {
            ScaleSelector::All { t_max } => (0..shells.len())
                .filter(|&k| shells.breakpoints[k] <= t_max + GAUGE_TOL)
                .collect(),
            ScaleSelector::GreaterThan { d, t_max } => {
                // For t just above D the lattice set is the one at D itself.
                let first = shells.index_at(*d).unwrap_or(0);
                let mut v = vec![first];
                v.extend(
                    (first + 1..shells.len()).filter(|&k| shells.breakpoints[k] <= t_max + GAUGE_TOL),
                );
                v
            }
            _ => nominal
                .iter()
                .map(|&t| shells.index_at(t).unwrap_or(0))
                .collect(),
        };
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::EmptyScales);
        }
        Ok(idx)
    }
}

fn check_positive(name: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(name, format!("need a finite positive scale, got {t}")));
    }
    Ok(())
}
