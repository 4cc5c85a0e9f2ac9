use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Absolute slack on the gauge when deciding lattice membership. Bodies are
/// closed, so points within this distance of the boundary count as inside.
pub const GAUGE_TOL: f64 = 1e-9;

/// Largest q treated as an integer exponent by the exact counting paths.
pub(crate) const MAX_INTEGER_Q: f64 = 64.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyKind {
    /// `{x : |x|_q <= 1}` with finite `q >= 1`.
    QBall { q: f64 },
    /// `[-1, 1]^d`, the `q = ∞` ball.
    Cube,
    /// `{x : Σ λ_j² x_j² <= 1}`.
    Ellipsoid { weights: Vec<f64> },
}

/// A convex symmetric body in `R^d`.
///
/// `BodySpec::qball(f64::INFINITY, d)` normalises to the cube, so the two
/// constructions compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    kind: BodyKind,
    dim: usize,
}

impl BodySpec {
    pub fn qball(q: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if q.is_nan() || q < 1.0 {
            return Err(invalid("q", format!("need q >= 1 or q = inf, got {q}")));
        }
        if q.is_infinite() {
            return Ok(Self::cube(dim));
        }
        Ok(Self {
            kind: BodyKind::QBall { q },
            dim,
        })
    }

    pub fn cube(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            kind: BodyKind::Cube,
            dim,
        }
    }

    /// Ellipsoid with arbitrary positive axis weights.
    pub fn ellipsoid(weights: Vec<f64>) -> Result<Self> {
        check_dim(weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid("weights", format!("weights must be positive, got {w}")));
        }
        Ok(Self {
            dim: weights.len(),
            kind: BodyKind::Ellipsoid { weights },
        })
    }

    /// Ellipsoid from the family `1 <= λ_1 < ... < λ_d < √2`.
    pub fn ellipsoid_paper_family(weights: Vec<f64>) -> Result<Self> {
        let ok_range = weights
            .iter()
            .all(|&w| (1.0..std::f64::consts::SQRT_2).contains(&w));
        let increasing = weights.windows(2).all(|p| p[0] < p[1]);
        if !ok_range || !increasing {
            return Err(invalid(
                "weights",
                "family weights must satisfy 1 <= λ_1 < ... < λ_d < √2",
            ));
        }
        Self::ellipsoid(weights)
    }

    /// Evenly spaced weights `λ_j = 1 + (j-1)/d · (√2 - 1)`, a member of the
    /// family above for every `d`.
    pub fn ellipsoid_family_default(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let span = std::f64::consts::SQRT_2 - 1.0;
        let weights = (0..dim)
            .map(|j| 1.0 + span * j as f64 / dim as f64)
            .collect();
        Self::ellipsoid_paper_family(weights)
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The same body type in another dimension. Ellipsoids keep their leading
    /// weights, so `r` may not exceed the current dimension for them.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        match &self.kind {
            BodyKind::QBall { q } => Self::qball(*q, dim),
            BodyKind::Cube => {
                check_dim(dim)?;
                Ok(Self::cube(dim))
            }
            BodyKind::Ellipsoid { weights } => {
                if dim > weights.len() {
                    return Err(invalid("dim", "cannot extend an ellipsoid's weights"));
                }
                Self::ellipsoid(weights[..dim].to_vec())
            }
        }
    }

    /// Exponent used for `κ(d, N) = N d^{-1/q}` and dyadic windows: `q` for
    /// q-balls, `∞` for the cube, 2 for ellipsoids.
    pub fn exponent(&self) -> f64 {
        match &self.kind {
            BodyKind::QBall { q } => *q,
            BodyKind::Cube => f64::INFINITY,
            BodyKind::Ellipsoid { .. } => 2.0,
        }
    }

    /// `Some(q)` when the body is a q-ball with small integer `q`.
    pub fn integer_q(&self) -> Option<u32> {
        match self.kind {
            BodyKind::QBall { q } if q.fract() == 0.0 && q <= MAX_INTEGER_Q => Some(q as u32),
            _ => None,
        }
    }

    /// Bodies invariant under coordinate permutations.
    pub fn is_exchangeable(&self) -> bool {
        !matches!(self.kind, BodyKind::Ellipsoid { .. })
    }

    /// Minkowski functional. Homogeneous of degree one and zero only at 0.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.gauge_unchecked(x))
    }

    pub(crate) fn gauge_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Cube => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            BodyKind::QBall { q } => {
                let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = x.iter().map(|v| (v.abs() / m).powf(*q)).sum();
                m * s.powf(1.0 / q)
            }
            BodyKind::Ellipsoid { weights } => {
                let m = x
                    .iter()
                    .zip(weights)
                    .fold(0.0_f64, |m, (v, w)| m.max((v * w).abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = x
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| {
                        let r = v * w / m;
                        r * r
                    })
                    .sum();
                m * s.sqrt()
            }
        }
    }

    /// Gauge of a lattice point. For integer `q` this is `s^{1/q}` with the
    /// power sum `s` formed exactly, so it agrees bit for bit with the
    /// breakpoints.
    pub(crate) fn gauge_int(&self, x: &[i64]) -> f64 {
        match &self.kind {
            BodyKind::Cube => x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64,
            BodyKind::QBall { .. } => {
                if let Some(q) = self.integer_q() {
                    let s = x.iter().try_fold(0u64, |acc, v| {
                        v.unsigned_abs().checked_pow(q).and_then(|p| acc.checked_add(p))
                    });
                    if let Some(s) = s {
                        return super::scales::power_root(s, q);
                    }
                }
                let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                self.gauge_unchecked(&xf)
            }
            BodyKind::Ellipsoid { .. } => {
                let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
                self.gauge_unchecked(&xf)
            }
        }
    }

    /// Half-widths of the integer bounding box of `G_t`.
    pub fn box_radius(&self, t: f64) -> Vec<i64> {
        let t = t + GAUGE_TOL;
        match &self.kind {
            BodyKind::Cube | BodyKind::QBall { .. } => vec![t.floor() as i64; self.dim],
            BodyKind::Ellipsoid { weights } => {
                weights.iter().map(|w| (t / w).floor() as i64).collect()
            }
        }
    }

    /// Smallest gauge of a nonzero lattice point.
    pub fn min_nonzero_gauge(&self) -> f64 {
        match &self.kind {
            BodyKind::Cube | BodyKind::QBall { .. } => 1.0,
            BodyKind::Ellipsoid { weights } => weights.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(invalid("dim", "dimension must be positive"));
    }
    Ok(())
}

/// `κ(d, N) = N d^{-1/q}`; `q` must be finite.
pub fn kappa(q: f64, d: usize, n: f64) -> Result<f64> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(invalid("q", format!("κ needs finite q >= 1, got {q}")));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(n > 0.0) {
        return Err(invalid("N", format!("radius must be positive, got {n}")));
    }
    Ok(n * (d as f64).powf(-1.0 / q))
}
