use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::LatticeFunction;
use crate::geometry::BodySpec;
use crate::operators::{MaximalPlan, ScaleSelector};

/// The larger root of `12C² - 22C + 5 = 0`, i.e. `(11 + √61)/12`.
pub fn melas_constant() -> f64 {
    let (a, b, c) = (12.0f64, -22.0f64, 5.0f64);
    (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
}

/// `‖M f‖_p / ‖f‖_p` for `p ∈ (1, ∞]`.
pub fn strong_ratio(body: &BodySpec, scales: &ScaleSelector, f: &LatticeFunction, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(invalid("p", format!("need p in (1, inf], got {p}")));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let m = MaximalPlan::new(body, scales)?.apply(f)?;
    Ok(m.norm(p)? / f.norm(p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRatio {
    /// The attained value `v` maximising `v · #{M f >= v}`.
    pub level: f64,
    pub ratio: f64,
}

/// `max_v v · #{x : values(x) >= v} / l1` over the attained positive values,
/// the left-limit reading of `sup_λ λ |{M f > λ}|`. Ties keep the larger
/// level.
pub(crate) fn left_limit_ratio(values: &[f64], l1: f64) -> WeakRatio {
    let mut v: Vec<f64> = values.iter().cloned().filter(|&x| x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut best = WeakRatio { level: 0.0, ratio: 0.0 };
    let mut i = 0;
    while i < v.len() {
        let level = v[i];
        while i < v.len() && v[i] == level {
            i += 1;
        }
        let r = level * i as f64 / l1;
        if r > best.ratio {
            best = WeakRatio { level, ratio: r };
        }
    }
    best
}

/// Weak-type ratio of a nonnegative witness; a lower bound for the weak
/// (1,1) constant restricted to `scales`.
pub fn weak_ratio(body: &BodySpec, scales: &ScaleSelector, f: &LatticeFunction) -> Result<WeakRatio> {
    let plan = MaximalPlan::new(body, scales)?;
    weak_ratio_with(&plan, f)
}

pub(crate) fn weak_ratio_with(plan: &MaximalPlan, f: &LatticeFunction) -> Result<WeakRatio> {
    if !f.is_nonnegative() {
        return Err(Error::SignedInput);
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let m = plan.apply(f)?;
    Ok(left_limit_ratio(m.values(), f.norm(1.0)?))
}
