use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::Serialize;

use super::body::{BodyKind, BodySpec, GAUGE_TOL};
use crate::error::{invalid, Error, Result};

/// Largest DP table (number of integer budgets) the exact counter accepts.
pub const DP_BUDGET_CAP: u64 = 1 << 31;

/// Largest number of recursion nodes the enumerating counter will visit.
pub const ENUMERATION_CAP: u64 = 1 << 33;

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    #[serde(serialize_with = "ser_big")]
    pub count: BigUint,
    /// `true` for integer arithmetic, `false` for floating thresholds.
    pub exact: bool,
    pub elapsed: Duration,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CountResult {
    pub fn to_f64(&self) -> f64 {
        big_to_f64(&self.count)
    }

    pub fn to_u128(&self) -> Option<u128> {
        u128::try_from(&self.count).ok()
    }
}

pub(crate) fn big_to_f64(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_string().parse().unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top: u64 = u64::try_from(v >> shift).unwrap_or(u64::MAX);
    top as f64 * (shift as f64).exp2()
}

/// Integer budget `⌊(t + tol)^q⌋` for the closed q-ball of radius `t`.
pub(crate) fn int_budget(t: f64, q: u32) -> Result<u64> {
    let b = (t + GAUGE_TOL).powi(q as i32).floor();
    if b >= 2f64.powi(62) {
        return Err(Error::BudgetExceeded {
            what: "integer budget t^q",
            limit: 1 << 62,
        });
    }
    Ok(b as u64)
}

/// Largest `k >= 0` with `k^q <= n`.
pub(crate) fn iroot(n: u64, q: u32) -> u64 {
    if q == 1 {
        return n;
    }
    let mut k = (n as f64).powf(1.0 / q as f64).floor() as u64;
    while k.checked_pow(q).is_none_or(|p| p > n) {
        k -= 1;
    }
    while (k + 1).checked_pow(q).is_some_and(|p| p <= n) {
        k += 1;
    }
    k
}

/// Membership test for `G_t ∩ Z^d` arranged for coordinate recursion.
pub(crate) enum LatticeBall {
    Cube { dim: usize, r: i64 },
    IntPow { dim: usize, q: u32, budget: u64 },
    /// `Σ w_i |x_i|^q <= budget`; ellipsoids use `q = 2, w_i = λ_i²`.
    Weighted { q: f64, w: Vec<f64>, budget: f64 },
}

impl LatticeBall {
    pub(crate) fn new(body: &BodySpec, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t", format!("scale must be finite and >= 0, got {t}")));
        }
        let dim = body.dim();
        Ok(match body.kind() {
            BodyKind::Cube => LatticeBall::Cube {
                dim,
                r: (t + GAUGE_TOL).floor() as i64,
            },
            BodyKind::QBall { q } => match body.integer_q() {
                Some(qi) => LatticeBall::IntPow {
                    dim,
                    q: qi,
                    budget: int_budget(t, qi)?,
                },
                None => LatticeBall::Weighted {
                    q: *q,
                    w: vec![1.0; dim],
                    budget: (t + GAUGE_TOL).powf(*q),
                },
            },
            BodyKind::Ellipsoid { weights } => LatticeBall::Weighted {
                q: 2.0,
                w: weights.iter().map(|l| l * l).collect(),
                budget: (t + GAUGE_TOL).powi(2),
            },
        })
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            LatticeBall::Cube { dim, .. } | LatticeBall::IntPow { dim, .. } => *dim,
            LatticeBall::Weighted { w, .. } => w.len(),
        }
    }

    fn float_kmax(q: f64, w: f64, rem: f64) -> i64 {
        if rem < 0.0 {
            return -1;
        }
        let mut k = (rem / w).powf(1.0 / q).floor() as i64;
        while k > 0 && w * (k as f64).powf(q) > rem {
            k -= 1;
        }
        while w * ((k + 1) as f64).powf(q) <= rem {
            k += 1;
        }
        k
    }

    /// Calls `f` on every lattice point, in lexicographic order.
    pub(crate) fn for_each(&self, f: &mut dyn FnMut(&[i64])) {
        let mut x = vec![0i64; self.dim()];
        match self {
            LatticeBall::Cube { r, .. } => {
                if *r < 0 {
                    return;
                }
                rec_cube(&mut x, 0, *r, f)
            }
            LatticeBall::IntPow { q, budget, .. } => rec_int(&mut x, 0, *q, *budget, f),
            LatticeBall::Weighted { q, w, budget } => rec_float(&mut x, 0, *q, w, *budget, f),
        }
    }

    /// Points with all coordinates nonnegative.
    pub(crate) fn for_each_nonneg(&self, f: &mut dyn FnMut(&[i64])) {
        self.for_each(&mut |x| {
            if x.iter().all(|&v| v >= 0) {
                f(x)
            }
        })
    }

    /// Number of points, counting the last coordinate in closed form.
    pub(crate) fn count_enumerated(&self) -> Result<u128> {
        let mut visits = 0u64;
        let n = match self {
            LatticeBall::Cube { dim, r } => {
                if *r < 0 {
                    0
                } else {
                    ((2 * *r + 1) as u128)
                        .checked_pow(*dim as u32)
                        .ok_or(Error::BudgetExceeded {
                            what: "cube count",
                            limit: u128::MAX,
                        })?
                }
            }
            LatticeBall::IntPow { dim, q, budget } => {
                count_int(*dim, *q, *budget, &mut visits)?
            }
            LatticeBall::Weighted { q, w, budget } => count_float(0, *q, w, *budget, &mut visits)?,
        };
        Ok(n)
    }

    pub(crate) fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.for_each(&mut |x| out.push(x.to_vec()));
        out
    }
}

fn rec_cube(x: &mut [i64], i: usize, r: i64, f: &mut dyn FnMut(&[i64])) {
    if i == x.len() {
        f(x);
        return;
    }
    for k in -r..=r {
        x[i] = k;
        rec_cube(x, i + 1, r, f);
    }
}

fn rec_int(x: &mut [i64], i: usize, q: u32, rem: u64, f: &mut dyn FnMut(&[i64])) {
    if i == x.len() {
        f(x);
        return;
    }
    let kmax = iroot(rem, q) as i64;
    for k in -kmax..=kmax {
        x[i] = k;
        rec_int(x, i + 1, q, rem - (k.unsigned_abs()).pow(q), f);
    }
}

fn rec_float(x: &mut [i64], i: usize, q: f64, w: &[f64], rem: f64, f: &mut dyn FnMut(&[i64])) {
    if i == x.len() {
        f(x);
        return;
    }
    let kmax = LatticeBall::float_kmax(q, w[i], rem);
    for k in -kmax..=kmax {
        x[i] = k;
        rec_float(x, i + 1, q, w, rem - w[i] * (k.abs() as f64).powf(q), f);
    }
}

fn bump(visits: &mut u64) -> Result<()> {
    *visits += 1;
    if *visits > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded {
            what: "lattice enumeration",
            limit: ENUMERATION_CAP as u128,
        });
    }
    Ok(())
}

fn count_int(dims_left: usize, q: u32, rem: u64, visits: &mut u64) -> Result<u128> {
    bump(visits)?;
    let kmax = iroot(rem, q);
    if dims_left == 1 {
        return Ok(2 * kmax as u128 + 1);
    }
    let mut total = count_int(dims_left - 1, q, rem, visits)?;
    for k in 1..=kmax {
        total += 2 * count_int(dims_left - 1, q, rem - k.pow(q), visits)?;
    }
    Ok(total)
}

fn count_float(i: usize, q: f64, w: &[f64], rem: f64, visits: &mut u64) -> Result<u128> {
    bump(visits)?;
    let kmax = LatticeBall::float_kmax(q, w[i], rem);
    if kmax < 0 {
        return Ok(0);
    }
    if i + 1 == w.len() {
        return Ok(2 * kmax as u128 + 1);
    }
    let mut total = count_float(i + 1, q, w, rem, visits)?;
    for k in 1..=kmax {
        total += 2 * count_float(i + 1, q, w, rem - w[i] * (k as f64).powf(q), visits)?;
    }
    Ok(total)
}

/// Powers `k^q <= smax` paired with their sign multiplicity.
fn power_steps(q: u32, smax: u64) -> Vec<(usize, u32)> {
    let mut steps = vec![(0usize, 1u32)];
    let mut k = 1u64;
    while let Some(p) = k.checked_pow(q).filter(|&p| p <= smax) {
        steps.push((p as usize, 2));
        k += 1;
    }
    steps
}

fn check_table(smax: u64) -> Result<usize> {
    if smax >= DP_BUDGET_CAP {
        return Err(Error::BudgetExceeded {
            what: "DP table size",
            limit: DP_BUDGET_CAP as u128,
        });
    }
    Ok(smax as usize + 1)
}

fn shells_u128(q: u32, r: usize, smax: u64) -> Result<Option<Vec<u128>>> {
    let len = check_table(smax)?;
    let steps = power_steps(q, smax);
    let mut cur = vec![0u128; len];
    cur[0] = 1;
    for _ in 0..r {
        let mut next = vec![0u128; len];
        for (s, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(p, m) in &steps {
                if s + p >= len {
                    break;
                }
                let add = match c.checked_mul(m as u128) {
                    Some(a) => a,
                    None => return Ok(None),
                };
                match next[s + p].checked_add(add) {
                    Some(v) => next[s + p] = v,
                    None => return Ok(None),
                }
            }
        }
        cur = next;
    }
    Ok(Some(cur))
}

fn shells_big(q: u32, r: usize, smax: u64) -> Result<Vec<BigUint>> {
    let len = check_table(smax)?;
    let steps = power_steps(q, smax);
    let mut cur = vec![BigUint::default(); len];
    cur[0] = BigUint::from(1u32);
    for _ in 0..r {
        let mut next = vec![BigUint::default(); len];
        for (s, c) in cur.iter().enumerate() {
            if *c == BigUint::default() {
                continue;
            }
            for &(p, m) in &steps {
                if s + p >= len {
                    break;
                }
                next[s + p] += c * m;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// `table[s] = #{x ∈ Z^r : Σ |x_i|^q = s}` for `s <= smax`.
pub fn shell_table(q: u32, r: usize, smax: u64) -> Result<Vec<BigUint>> {
    if q == 0 || r == 0 {
        return Err(invalid("q, r", "need q >= 1 and r >= 1"));
    }
    match shells_u128(q, r, smax)? {
        Some(v) => Ok(v.into_iter().map(BigUint::from).collect()),
        None => shells_big(q, r, smax),
    }
}

/// `#{x ∈ Z^r : Σ |x_i|^q = s}`. Only integer `q` has exact shells.
pub fn shell_count(q: f64, r: usize, s: u64) -> Result<BigUint> {
    if !(q >= 1.0 && q.fract() == 0.0 && q <= super::body::MAX_INTEGER_Q) {
        return Err(Error::Unsupported(format!(
            "shell counts need a small integer q, got {q}"
        )));
    }
    Ok(shell_table(q as u32, r, s)?.swap_remove(s as usize))
}

fn int_ball_count(q: u32, d: usize, budget: u64) -> Result<BigUint> {
    if let Some(v) = shells_u128(q, d, budget)? {
        let mut acc = 0u128;
        let mut fits = true;
        for c in &v {
            match acc.checked_add(*c) {
                Some(a) => acc = a,
                None => {
                    fits = false;
                    break;
                }
            }
        }
        if fits {
            return Ok(BigUint::from(acc));
        }
    }
    Ok(shells_big(q, d, budget)?.iter().sum())
}

/// `|G_t ∩ Z^d|` for the closed dilate `G_t`.
pub fn lattice_count(body: &BodySpec, t: f64) -> Result<CountResult> {
    let start = Instant::now();
    let ball = LatticeBall::new(body, t)?;
    let (count, exact) = match &ball {
        LatticeBall::Cube { dim, r } => (BigUint::from((2 * *r + 1) as u64).pow(*dim as u32), true),
        LatticeBall::IntPow { dim, q, budget } => (int_ball_count(*q, *dim, *budget)?, true),
        LatticeBall::Weighted { .. } => (BigUint::from(ball.count_enumerated()?), false),
    };
    Ok(CountResult {
        count,
        exact,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(body: &BodySpec, t: f64) -> u64 {
        let r = body.box_radius(t);
        let d = body.dim();
        let mut x = vec![0i64; d];
        let mut n = 0;
        fn go(body: &BodySpec, t: f64, r: &[i64], x: &mut Vec<i64>, i: usize, n: &mut u64) {
            if i == x.len() {
                if body.gauge_int(x) <= t + GAUGE_TOL {
                    *n += 1;
                }
                return;
            }
            for k in -r[i]..=r[i] {
                x[i] = k;
                go(body, t, r, x, i + 1, n);
            }
        }
        go(body, t, &r, &mut x, 0, &mut n);
        let _ = d;
        n
    }

    #[test]
    fn documented_counts() {
        let c = lattice_count(&BodySpec::cube(2), 1.7).unwrap();
        assert_eq!(c.count, BigUint::from(9u32));
        assert!(c.exact);
        let l1 = BodySpec::qball(1.0, 2).unwrap();
        assert_eq!(lattice_count(&l1, 2.0).unwrap().count, BigUint::from(13u32));
        let l2 = BodySpec::qball(2.0, 2).unwrap();
        assert_eq!(lattice_count(&l2, 2.0).unwrap().count, BigUint::from(13u32));
        assert_eq!(lattice_count(&l2, 0.0).unwrap().count, BigUint::from(1u32));
    }

    #[test]
    fn shells() {
        assert_eq!(shell_count(2.0, 2, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(shell_count(2.0, 2, 1).unwrap(), BigUint::from(4u32));
        assert_eq!(shell_count(2.0, 2, 25).unwrap(), BigUint::from(12u32));
        assert!(matches!(shell_count(2.5, 2, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn shells_reconstruct_ball_count() {
        for q in 1..=4u32 {
            for r in 1..=4usize {
                let s = 40u64;
                let table = shell_table(q, r, s).unwrap();
                let total: BigUint = table.iter().sum();
                let body = BodySpec::qball(q as f64, r).unwrap();
                let t = (s as f64).powf(1.0 / q as f64);
                assert_eq!(total, lattice_count(&body, t).unwrap().count, "q={q} r={r}");
            }
        }
    }

    #[test]
    fn matches_brute_force_all_kinds() {
        let bodies = [
            BodySpec::qball(1.0, 3).unwrap(),
            BodySpec::qball(2.0, 3).unwrap(),
            BodySpec::qball(3.0, 2).unwrap(),
            BodySpec::qball(2.5, 3).unwrap(),
            BodySpec::qball(1.3, 2).unwrap(),
            BodySpec::cube(3),
            BodySpec::ellipsoid(vec![1.0, 1.2, 1.4]).unwrap(),
        ];
        for b in &bodies {
            for &t in &[0.0, 0.4, 1.0, 1.5, 2.0, 2.9, 4.0, 5.5] {
                let got = lattice_count(b, t).unwrap().to_u128().unwrap();
                assert_eq!(got, brute(b, t) as u128, "{b:?} t={t}");
                let mut n = 0u128;
                LatticeBall::new(b, t).unwrap().for_each(&mut |_| n += 1);
                assert_eq!(n, got);
            }
        }
    }

    #[test]
    fn huge_counts_switch_to_bigint() {
        let body = BodySpec::qball(2.0, 60).unwrap();
        let c = lattice_count(&body, 10.0).unwrap();
        assert!(c.count.bits() > 128);
        let cube = lattice_count(&BodySpec::cube(100), 3.0).unwrap();
        assert_eq!(cube.count, BigUint::from(7u32).pow(100));
    }

    #[test]
    fn dp_cap_is_enforced() {
        let body = BodySpec::qball(4.0, 2).unwrap();
        assert!(matches!(
            lattice_count(&body, 300.0),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn integer_roots() {
        for q in 1..=5u32 {
            for n in 0..2000u64 {
                let k = iroot(n, q);
                assert!(k.pow(q) <= n && (k + 1).pow(q) > n);
            }
        }
    }
}
