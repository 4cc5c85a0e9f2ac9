use super::body::{BodyKind, BodySpec, GAUGE_TOL};
use super::count::{int_budget, shell_table, LatticeBall};
use crate::error::{invalid, Result};

/// Scale standing in for every `t` whose lattice set is `{0}`.
pub fn degenerate_scale(body: &BodySpec) -> f64 {
    0.5 * body.min_nonzero_gauge()
}

fn check_tmax(t_max: f64) -> Result<()> {
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(invalid("t_max", format!("need finite t_max >= 0, got {t_max}")));
    }
    Ok(())
}

/// Merges sorted gauges closer than the membership tolerance, keeping the
/// largest value of each run.
fn merge_close(sorted: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &g in sorted {
        match out.last_mut() {
            Some(last) if g - *last <= GAUGE_TOL => *last = g,
            _ => out.push(g),
        }
    }
    out
}

/// The distinct scales in `(0, t_max]` at which `G_t ∩ Z^d` changes, led by
/// the degenerate scale. A sup of averages over `t ∈ (0, t_max]` equals the
/// max over these values.
pub fn scale_breakpoints(body: &BodySpec, t_max: f64) -> Result<Vec<f64>> {
    check_tmax(t_max)?;
    if t_max == 0.0 {
        return Ok(Vec::new());
    }
    let mut out = vec![degenerate_scale(body).min(t_max)];
    match body.kind() {
        BodyKind::Cube => {
            let r = (t_max + GAUGE_TOL).floor() as i64;
            out.extend((1..=r).map(|k| k as f64));
        }
        BodyKind::QBall { .. } if body.integer_q().is_some() => {
            let q = body.integer_q().unwrap();
            let budget = int_budget(t_max, q)?;
            let table = shell_table(q, body.dim(), budget)?;
            let zero = num_bigint::BigUint::default();
            out.extend(
                table
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, c)| **c != zero)
                    .map(|(s, _)| power_root(s as u64, q)),
            );
        }
        _ => {
            let ball = LatticeBall::new(body, t_max)?;
            let mut gauges = Vec::new();
            ball.for_each_nonneg(&mut |x| {
                if x.iter().any(|&v| v != 0) {
                    gauges.push(body.gauge_int(x));
                }
            });
            gauges.sort_by(f64::total_cmp);
            out.extend(merge_close(&gauges));
        }
    }
    Ok(out)
}

pub(crate) fn power_root(s: u64, q: u32) -> f64 {
    match q {
        1 => s as f64,
        2 => (s as f64).sqrt(),
        _ => (s as f64).powf(1.0 / q as f64),
    }
}

/// The lattice points of `G_{t_max}` grouped into shells, one shell per
/// breakpoint: shell `k` holds the points that enter at `breakpoints[k]`.
#[derive(Clone, Debug)]
pub struct ScaleShells {
    pub breakpoints: Vec<f64>,
    dim: usize,
    /// Flattened points, shell by shell.
    points: Vec<i64>,
    /// `starts[k]..starts[k+1]` indexes the points of shell `k`.
    starts: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum ShellKey {
    Int(u64),
    Real(f64),
}

impl ScaleShells {
    pub fn new(body: &BodySpec, t_max: f64) -> Result<Self> {
        check_tmax(t_max)?;
        let dim = body.dim();
        if t_max == 0.0 {
            return Ok(Self {
                breakpoints: Vec::new(),
                dim,
                points: Vec::new(),
                starts: vec![0],
            });
        }
        let ball = LatticeBall::new(body, t_max)?;
        let iq = body.integer_q();
        let is_cube = matches!(body.kind(), BodyKind::Cube);
        let mut keyed: Vec<(ShellKey, Vec<i64>)> = Vec::new();
        ball.for_each(&mut |x| {
            let key = if is_cube {
                ShellKey::Int(x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0))
            } else if let Some(q) = iq {
                ShellKey::Int(x.iter().map(|v| v.unsigned_abs().pow(q)).sum())
            } else {
                ShellKey::Real(body.gauge_int(x))
            };
            keyed.push((key, x.to_vec()));
        });
        // Stable sort keeps lexicographic order inside each shell.
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite gauges"));

        let mut breakpoints = vec![degenerate_scale(body).min(t_max)];
        let mut points = Vec::with_capacity(keyed.len() * dim);
        let mut starts = vec![0usize];
        let mut current: Option<f64> = None;
        for (key, x) in keyed {
            let g = match key {
                ShellKey::Int(0) | ShellKey::Real(0.0) => {
                    points.extend_from_slice(&x);
                    continue;
                }
                ShellKey::Int(s) if is_cube => s as f64,
                ShellKey::Int(s) => power_root(s, iq.unwrap()),
                ShellKey::Real(g) => g,
            };
            let same = match (current, key) {
                (Some(c), ShellKey::Int(_)) => c == g,
                (Some(c), ShellKey::Real(_)) => g - c <= GAUGE_TOL,
                (None, _) => false,
            };
            if same {
                *breakpoints.last_mut().unwrap() = g;
            } else {
                starts.push(points.len() / dim);
                breakpoints.push(g);
            }
            current = Some(g);
            points.extend_from_slice(&x);
        }
        starts.push(points.len() / dim);
        Ok(Self {
            breakpoints,
            dim,
            points,
            starts,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Points entering at breakpoint `k`, flattened with stride `dim`.
    pub fn shell(&self, k: usize) -> &[i64] {
        &self.points[self.starts[k] * self.dim..self.starts[k + 1] * self.dim]
    }

    /// `|G_{breakpoints[k]} ∩ Z^d|`.
    pub fn cumulative_count(&self, k: usize) -> usize {
        self.starts[k + 1]
    }

    /// Index of the largest breakpoint `<= t`, or `None` below the first.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let n = self.breakpoints.partition_point(|&b| b <= t + GAUGE_TOL);
        n.checked_sub(1)
    }
}
