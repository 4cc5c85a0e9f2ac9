use super::average::average;
use super::selector::dyadic_window;
use super::semigroup::semigroup_apply;
use crate::error::{Error, Result};
use crate::function::LatticeFunction;
use crate::geometry::BodySpec;

/// Smallest box containing every input box.
pub(crate) fn union_box(fs: &[&LatticeFunction]) -> (Vec<i64>, Vec<usize>) {
    let d = fs[0].dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for f in fs {
        for k in 0..d {
            lo[k] = lo[k].min(f.offset()[k]);
            hi[k] = hi[k].max(f.offset()[k] + f.shape()[k] as i64);
        }
    }
    let shape = lo.iter().zip(&hi).map(|(l, h)| (h - l) as usize).collect();
    (lo, shape)
}

/// `dst[x] = op(dst[x], src[x])` for every `x` in the box of `src`, which
/// must sit inside the box of `dst`.
pub(crate) fn combine_into(dst: &mut LatticeFunction, src: &LatticeFunction, op: impl Fn(f64, f64) -> f64) {
    for (i, &v) in src.values().iter().enumerate() {
        let x = src.point(i);
        let j = dst.index_of(&x).expect("destination box covers source");
        let slot = &mut dst.values_mut()[j];
        *slot = op(*slot, v);
    }
}

/// `Sf = (Σ_{N ∈ 𝔻_{C1,C2}} |M_N f - P_{N²/d^{2/q}} f|²)^{1/2}` for the q-ball.
pub fn square_function(q: f64, c1: f64, c2: f64, f: &LatticeFunction) -> Result<LatticeFunction> {
    let d = f.dim();
    let body = BodySpec::qball(q, d)?;
    let window = dyadic_window(q, d, c1, c2)?;
    if window.is_empty() {
        return Err(Error::EmptyWindow { c1, c2, d, q });
    }
    let scale = if q.is_infinite() { 1.0 } else { (d as f64).powf(2.0 / q) };
    let mut diffs = Vec::with_capacity(window.len());
    for &n in &window {
        let a = average(&body, n, f)?;
        let p = semigroup_apply(n * n / scale, f)?;
        let (off, shape) = union_box(&[&a, &p]);
        let mut diff = LatticeFunction::zeros(off, shape)?;
        combine_into(&mut diff, &a, |x, y| x + y);
        combine_into(&mut diff, &p, |x, y| x - y);
        diffs.push(diff);
    }
    let refs: Vec<&LatticeFunction> = diffs.iter().collect();
    let (off, shape) = union_box(&refs);
    let mut acc = LatticeFunction::zeros(off, shape)?;
    for diff in &diffs {
        combine_into(&mut acc, diff, |x, y| x + y * y);
    }
    acc.values_mut().iter_mut().for_each(|v| *v = v.sqrt());
    Ok(acc)
}
