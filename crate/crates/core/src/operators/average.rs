use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::function::{cell_count, LatticeFunction};
use crate::geometry::{BodyKind, BodySpec, LatticeBall};

/// One line of a kernel along the last axis: points `(prefix, lo..=hi)`.
pub(crate) struct KernelRow {
    pub prefix: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

/// Groups the lattice points of `G_t` into rows along the last axis.
pub(crate) fn kernel_rows(ball: &LatticeBall) -> Vec<KernelRow> {
    let mut rows: Vec<KernelRow> = Vec::new();
    ball.for_each(&mut |y| {
        let (prefix, last) = y.split_at(y.len() - 1);
        match rows.last_mut() {
            Some(r) if r.prefix == prefix && r.hi + 1 == last[0] => r.hi = last[0],
            _ => rows.push(KernelRow {
                prefix: prefix.to_vec(),
                lo: last[0],
                hi: last[0],
            }),
        }
    });
    rows
}

/// Rows shorter than this are summed directly rather than by prefix
/// differences, which keeps tiny kernels free of cancellation error.
const SHORT_ROW: i64 = 8;

/// Sums `f(x - y)` over the kernel rows for every `x` in the box dilated by
/// `radius`, using prefix sums along the last axis.
pub(crate) fn row_sums(f: &LatticeFunction, rows: &[KernelRow], radius: &[i64]) -> Result<LatticeFunction> {
    let d = f.dim();
    let out_offset: Vec<i64> = f.offset().iter().zip(radius).map(|(o, r)| o - r).collect();
    let out_shape: Vec<usize> = f
        .shape()
        .iter()
        .zip(radius)
        .map(|(s, r)| s + 2 * *r as usize)
        .collect();
    let n_out = cell_count(&out_shape)?;
    let in_last = f.shape()[d - 1];
    let out_last = out_shape[d - 1];

    // prefix[row * (in_last + 1) + j] = Σ_{i<j} f[row, i]
    let in_rows = f.len() / in_last;
    let mut prefix = vec![0.0; in_rows * (in_last + 1)];
    for r in 0..in_rows {
        let src = &f.values()[r * in_last..(r + 1) * in_last];
        let dst = &mut prefix[r * (in_last + 1)..(r + 1) * (in_last + 1)];
        for j in 0..in_last {
            dst[j + 1] = dst[j] + src[j];
        }
    }

    let mut values = vec![0.0; n_out];
    let f_off = f.offset();
    let f_shape = f.shape();
    let out_rows_shape = &out_shape[..d - 1];
    values
        .par_chunks_mut(out_last)
        .enumerate()
        .for_each(|(orow, out)| {
            // Prefix coordinates of this output row.
            let mut xp = vec![0i64; d - 1];
            let mut rem = orow;
            for k in (0..d - 1).rev() {
                xp[k] = out_offset[k] + (rem % out_rows_shape[k]) as i64;
                rem /= out_rows_shape[k];
            }
            for row in rows {
                let mut src_row = 0usize;
                let mut inside = true;
                for k in 0..d - 1 {
                    let z = xp[k] - row.prefix[k] - f_off[k];
                    if z < 0 || z as usize >= f_shape[k] {
                        inside = false;
                        break;
                    }
                    src_row = src_row * f_shape[k] + z as usize;
                }
                if !inside {
                    continue;
                }
                let p = &prefix[src_row * (in_last + 1)..(src_row + 1) * (in_last + 1)];
                let src = &f.values()[src_row * in_last..(src_row + 1) * in_last];
                let base = out_offset[d - 1] - f_off[d - 1];
                let short = row.hi - row.lo < SHORT_ROW;
                for (j, o) in out.iter_mut().enumerate() {
                    // x_d - y_d ranges over [x_d - hi, x_d - lo] in input coordinates.
                    let xd = base + j as i64;
                    let a = (xd - row.hi).max(0);
                    let b = (xd - row.lo + 1).min(in_last as i64);
                    if a >= b {
                        continue;
                    }
                    if short {
                        *o += src[a as usize..b as usize].iter().sum::<f64>();
                    } else {
                        *o += p[b as usize] - p[a as usize];
                    }
                }
            }
        });
    LatticeFunction::new(out_offset, out_shape, values)
}

/// `|G_t ∩ Z^d|^{-1} Σ_{y ∈ G_t ∩ Z^d} f(x - y)` on the support box of `f`
/// dilated by the kernel's bounding box.
pub fn average(body: &BodySpec, t: f64, f: &LatticeFunction) -> Result<LatticeFunction> {
    check_inputs(body, t, f)?;
    let ball = LatticeBall::new(body, t)?;
    let rows = kernel_rows(&ball);
    let count: usize = rows.iter().map(|r| (r.hi - r.lo + 1) as usize).sum();
    let mut out = row_sums(f, &rows, &body.box_radius(t))?;
    let c = count as f64;
    out.values_mut().iter_mut().for_each(|v| *v /= c);
    Ok(out)
}

/// Cube averages as `d` successive one-dimensional window sums.
pub fn average_cube_separable(body: &BodySpec, t: f64, f: &LatticeFunction) -> Result<LatticeFunction> {
    check_inputs(body, t, f)?;
    if !matches!(body.kind(), BodyKind::Cube) {
        return Err(invalid("body", "the separable path exists only for the cube"));
    }
    let r = body.box_radius(t)[0];
    let window = vec![1.0; (2 * r + 1) as usize];
    let mut g = f.clone();
    for axis in 0..f.dim() {
        g = convolve_axis(&g, axis, &window, r)?;
    }
    let c = ((2 * r + 1) as f64).powi(f.dim() as i32);
    g.values_mut().iter_mut().for_each(|v| *v /= c);
    Ok(g)
}

fn check_inputs(body: &BodySpec, t: f64, f: &LatticeFunction) -> Result<()> {
    if body.dim() != f.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: body.dim(),
            got: f.dim(),
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("need a finite t > 0, got {t}")));
    }
    Ok(())
}

/// Full convolution along `axis` with `kernel[j] = k(j - radius)`.
pub(crate) fn convolve_axis(
    f: &LatticeFunction,
    axis: usize,
    kernel: &[f64],
    radius: i64,
) -> Result<LatticeFunction> {
    let shape = f.shape();
    let mut out_shape = shape.to_vec();
    out_shape[axis] += 2 * radius as usize;
    let mut out_offset = f.offset().to_vec();
    out_offset[axis] -= radius;
    let n_out = cell_count(&out_shape)?;
    let inner: usize = shape[axis + 1..].iter().product();
    let (n_in, n_ax) = (shape[axis], out_shape[axis]);
    let mut values = vec![0.0; n_out];
    let src = f.values();
    values
        .par_chunks_mut(n_ax * inner)
        .enumerate()
        .for_each(|(o, block)| {
            let sblock = &src[o * n_in * inner..(o + 1) * n_in * inner];
            for j in 0..n_ax {
                let dst = &mut block[j * inner..(j + 1) * inner];
                for (m, &w) in kernel.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    // out[j] += k[m] * in[j - m]
                    let i = j as i64 - m as i64;
                    if i < 0 || i as usize >= n_in {
                        continue;
                    }
                    let s = &sblock[i as usize * inner..(i as usize + 1) * inner];
                    for (a, b) in dst.iter_mut().zip(s) {
                        *a += w * b;
                    }
                }
            }
        });
    LatticeFunction::new(out_offset, out_shape, values)
}
