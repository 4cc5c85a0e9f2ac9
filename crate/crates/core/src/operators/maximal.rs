use rayon::prelude::*;

use super::selector::ScaleSelector;
use crate::error::{Error, Result};
use crate::function::{cell_count, LatticeFunction};
use crate::geometry::{lattice_count, BodySpec, ScaleShells, GAUGE_TOL};

/// A maximal operator with its scale set reduced to breakpoint indices.
/// Building the plan enumerates the kernel once; `apply` can then be called
/// on many functions.
#[derive(Clone, Debug)]
pub struct MaximalPlan {
    body: BodySpec,
    shells: ScaleShells,
    selected: Vec<usize>,
    is_selected: Vec<bool>,
    reach: Vec<i64>,
}

impl MaximalPlan {
    pub fn new(body: &BodySpec, selector: &ScaleSelector) -> Result<Self> {
        let (_, t_max) = selector.expand(body)?;
        let shells = ScaleShells::new(body, t_max)?;
        let selected = selector.select(body, &shells)?;
        let kmax = *selected.last().ok_or(Error::EmptyScales)?;
        let mut is_selected = vec![false; kmax + 1];
        for &k in &selected {
            is_selected[k] = true;
        }
        let reach = body.box_radius(shells.breakpoints[kmax]);
        Ok(Self {
            body: body.clone(),
            shells,
            selected,
            is_selected,
            reach,
        })
    }

    pub fn body(&self) -> &BodySpec {
        &self.body
    }

    /// Effective scales: one representative breakpoint per distinct average.
    pub fn scales(&self) -> Vec<f64> {
        self.selected.iter().map(|&k| self.shells.breakpoints[k]).collect()
    }

    /// Largest effective scale.
    pub fn t_max(&self) -> f64 {
        self.shells.breakpoints[self.kmax()]
    }

    fn kmax(&self) -> usize {
        *self.selected.last().expect("nonempty selection")
    }

    /// Kernel points of the largest effective scale.
    pub fn kernel_size(&self) -> usize {
        self.shells.cumulative_count(self.kmax())
    }

    /// Box of `f` dilated by the reach of the largest scale.
    fn output_box(&self, f: &LatticeFunction) -> Result<(Vec<i64>, Vec<usize>)> {
        if f.dim() != self.body.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.body.dim(),
                got: f.dim(),
            });
        }
        let off = f.offset().iter().zip(&self.reach).map(|(o, r)| o - r).collect();
        let shape: Vec<usize> = f
            .shape()
            .iter()
            .zip(&self.reach)
            .map(|(s, r)| s + 2 * *r as usize)
            .collect();
        cell_count(&shape)?;
        Ok((off, shape))
    }

    /// Picks the sparse path when `f` has few nonzero values.
    pub fn apply(&self, f: &LatticeFunction) -> Result<LatticeFunction> {
        let nnz = f.values().iter().filter(|v| **v != 0.0).count();
        if 4 * nnz < self.kernel_size() {
            self.apply_sparse(f)
        } else {
            self.apply_dense(f)
        }
    }

    /// Accumulates shells outward from the origin at every output point.
    pub fn apply_dense(&self, f: &LatticeFunction) -> Result<LatticeFunction> {
        let (off, shape) = self.output_box(f)?;
        let out = LatticeFunction::zeros(off, shape)?;
        let d = f.dim();
        let cap = f.max_abs();
        let kmax = self.kmax();
        let values: Vec<f64> = (0..out.len())
            .into_par_iter()
            .map(|i| {
                let x = out.point(i);
                let mut z = vec![0i64; d];
                let (mut sum, mut best) = (0.0f64, 0.0f64);
                for k in 0..=kmax {
                    for y in self.shells.shell(k).chunks_exact(d) {
                        for j in 0..d {
                            z[j] = x[j] - y[j];
                        }
                        sum += f.get(&z);
                    }
                    if self.is_selected[k] {
                        best = best.max((sum / self.shells.cumulative_count(k) as f64).abs());
                    }
                }
                best.min(cap)
            })
            .collect();
        LatticeFunction::new(out.offset().to_vec(), out.shape().to_vec(), values)
    }

    /// Works from the atoms of `f`: the average at scale index `k` only
    /// changes when an atom enters, so at each output point the sup is taken
    /// over the first selected index at or after each atom's shell.
    pub fn apply_sparse(&self, f: &LatticeFunction) -> Result<LatticeFunction> {
        let (off, shape) = self.output_box(f)?;
        let out = LatticeFunction::zeros(off, shape)?;
        let atoms: Vec<(Vec<i64>, f64)> = f.iter().filter(|(_, v)| *v != 0.0).collect();
        let cap = f.max_abs();
        let d = f.dim();
        let limit = self.t_max() + GAUGE_TOL;
        let values: Vec<f64> = (0..out.len())
            .into_par_iter()
            .map(|i| {
                let x = out.point(i);
                let mut v = vec![0i64; d];
                let mut hits: Vec<(usize, f64)> = Vec::with_capacity(atoms.len());
                for (a, w) in &atoms {
                    for j in 0..d {
                        v[j] = x[j] - a[j];
                    }
                    let g = self.body.gauge_int(&v);
                    if g <= limit {
                        hits.push((self.shells.index_at(g).unwrap_or(0), *w));
                    }
                }
                if hits.is_empty() {
                    return 0.0;
                }
                hits.sort_by(|p, q| p.0.cmp(&q.0));
                let mut cands: Vec<usize> = hits
                    .iter()
                    .filter_map(|(s, _)| {
                        let p = self.selected.partition_point(|&k| k < *s);
                        self.selected.get(p).copied()
                    })
                    .collect();
                cands.dedup();
                let (mut best, mut sum, mut h) = (0.0f64, 0.0f64, 0usize);
                for k in cands {
                    while h < hits.len() && hits[h].0 <= k {
                        sum += hits[h].1;
                        h += 1;
                    }
                    best = best.max((sum / self.shells.cumulative_count(k) as f64).abs());
                }
                best.min(cap)
            })
            .collect();
        LatticeFunction::new(out.offset().to_vec(), out.shape().to_vec(), values)
    }
}

/// `sup_t |average(body, t, f)|` over the scales picked by `selector`.
pub fn maximal(body: &BodySpec, selector: &ScaleSelector, f: &LatticeFunction) -> Result<LatticeFunction> {
    MaximalPlan::new(body, selector)?.apply(f)
}

/// Bound `‖f‖_1 / |G_{t_max} ∩ Z^d|` on every average beyond the truncation.
pub fn truncation_bound(body: &BodySpec, f: &LatticeFunction, t_max: f64) -> Result<f64> {
    let c = lattice_count(body, t_max)?.to_f64();
    Ok(f.norm(1.0)? / c)
}
