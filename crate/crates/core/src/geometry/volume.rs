use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// A nonnegative real stored as `mantissa · 2^exp2`, so volumes of very
/// high-dimensional balls never collapse to `inf` or `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub mantissa: f64,
    pub exp2: i64,
}

impl Volume {
    pub const ZERO: Volume = Volume {
        mantissa: 0.0,
        exp2: 0,
    };

    fn from_ln(ln: f64) -> Self {
        if ln.abs() < 700.0 {
            return Self {
                mantissa: ln.exp(),
                exp2: 0,
            };
        }
        let log2 = ln / std::f64::consts::LN_2;
        let e = log2.floor();
        Self {
            mantissa: (log2 - e).exp2(),
            exp2: e as i64,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// The value as an `f64`, or an overflow error when out of range.
    pub fn to_f64(&self) -> Result<f64> {
        if self.exp2 == 0 {
            return Ok(self.mantissa);
        }
        let v = self.mantissa * (self.exp2 as f64).exp2();
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Overflow {
                log2: self.ln() / std::f64::consts::LN_2,
            })
        }
    }

    /// `self · c` for finite `c > 0`.
    pub fn scale(&self, c: f64) -> Volume {
        if self.is_zero() {
            return *self;
        }
        if self.exp2 == 0 {
            let v = self.mantissa * c;
            if v.is_finite() && v.is_normal() {
                return Volume {
                    mantissa: v,
                    exp2: 0,
                };
            }
        }
        Volume::from_ln(self.ln() + c.ln())
    }
}

/// Lebesgue measure of the q-ball of radius `r` in `R^d`.
pub fn ball_volume(q: f64, d: usize, r: f64) -> Result<Volume> {
    if q.is_nan() || q < 1.0 {
        return Err(invalid("q", format!("need q >= 1 or q = inf, got {q}")));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("R", format!("radius must be finite and >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(Volume::ZERO);
    }
    let df = d as f64;
    if q.is_infinite() {
        if let Ok(e) = i32::try_from(d) {
            let v = (2.0 * r).powi(e);
            if v.is_finite() && v.is_normal() {
                return Ok(Volume {
                    mantissa: v,
                    exp2: 0,
                });
            }
        }
        return Ok(Volume::from_ln(df * (2.0 * r).ln()));
    }
    let ln = df * std::f64::consts::LN_2 + df * ln_gamma(1.0 + 1.0 / q) - ln_gamma(1.0 + df / q)
        + df * r.ln();
    Ok(Volume::from_ln(ln))
}
