use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ratios::{strong_ratio, weak_ratio_with, WeakRatio};
use crate::error::{invalid, Result};
use crate::function::LatticeFunction;
use crate::geometry::BodySpec;
use crate::operators::{MaximalPlan, ScaleSelector};
use crate::rng::stream;

pub const RECORD_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest number of Dirac masses in a candidate.
    pub atoms_max: usize,
    /// Exhaustive candidates place atoms in `[0, 2·radius]^d` with one atom
    /// at the origin.
    pub radius: i64,
    /// Weights tried for every atom but the first, which is fixed at 1.
    pub weights: Vec<f64>,
    /// Longest equally spaced unit-weight train tried before the exhaustive
    /// phase, with spacings `1..=2·radius`; 0 disables trains.
    pub train_max: usize,
    /// Total number of witness evaluations. The last tenth is kept for local
    /// search.
    pub budget: u64,
    /// Largest scale; defaults to `3 · 2 · radius`.
    pub t_max: Option<f64>,
    pub seed: u64,
    /// Proposals per local-search round.
    pub batch: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            atoms_max: 3,
            radius: 20,
            weights: vec![1.0],
            train_max: 0,
            budget: 10_000,
            t_max: None,
            seed: 0,
            batch: 64,
        }
    }
}

impl SearchConfig {
    pub fn effective_t_max(&self) -> f64 {
        self.t_max.unwrap_or(6.0 * self.radius as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantKind {
    Strong { p: f64 },
    Weak11,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub evaluations: u64,
    /// Train and exhaustive candidates.
    pub structured_evaluations: u64,
    pub local_evaluations: u64,
    /// The structured phases stopped early for lack of budget.
    pub budget_exhausted: bool,
    /// `(evaluation index, ratio)` at every improvement.
    pub improvements: Vec<(u64, f64)>,
}

/// A certified lower bound together with the witness that attains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub version: u32,
    pub kind: ConstantKind,
    pub body: BodySpec,
    pub selector: ScaleSelector,
    pub lower_bound: f64,
    pub witness: LatticeFunction,
    pub witness_level: Option<f64>,
    pub seed: Option<u64>,
    pub search_trace: Option<SearchTrace>,
    /// Seconds since the epoch; left out by default so artifacts stay
    /// byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub created_unix: Option<u64>,
}

impl ConstantEstimate {
    /// Recomputes the ratio of the stored witness.
    pub fn recompute(&self) -> Result<f64> {
        match self.kind {
            ConstantKind::Weak11 => {
                let plan = MaximalPlan::new(&self.body, &self.selector)?;
                Ok(weak_ratio_with(&plan, &self.witness)?.ratio)
            }
            ConstantKind::Strong { p } => strong_ratio(&self.body, &self.selector, &self.witness, p),
        }
    }

    pub fn strong(body: &BodySpec, selector: &ScaleSelector, f: &LatticeFunction, p: f64) -> Result<Self> {
        Ok(Self {
            version: RECORD_VERSION,
            kind: ConstantKind::Strong { p },
            body: body.clone(),
            selector: selector.clone(),
            lower_bound: strong_ratio(body, selector, f, p)?,
            witness: f.clone(),
            witness_level: None,
            seed: None,
            search_trace: None,
            created_unix: None,
        })
    }
}

type Atoms = Vec<(Vec<i64>, f64)>;

fn cmp_atoms(a: &Atoms, b: &Atoms) -> Ordering {
    for ((pa, wa), (pb, wb)) in a.iter().zip(b) {
        match pa.cmp(pb).then(wa.total_cmp(wb)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Clone)]
struct Candidate {
    atoms: Atoms,
    score: WeakRatio,
}

/// Higher ratio wins; ties go to the lexicographically smaller witness.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.score.ratio.total_cmp(&b.score.ratio) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => cmp_atoms(&a.atoms, &b.atoms) == Ordering::Less,
    }
}

fn evaluate(plan: &MaximalPlan, atoms: Atoms) -> Option<Candidate> {
    let f = LatticeFunction::from_atoms(plan.body().dim(), &atoms).ok()?;
    let score = weak_ratio_with(plan, &f).ok()?;
    Some(Candidate { atoms, score })
}

fn best_of(plan: &MaximalPlan, batch: Vec<Atoms>) -> Option<Candidate> {
    batch
        .into_par_iter()
        .filter_map(|a| evaluate(plan, a))
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
}

/// Points of `[0, span]^d` in lexicographic order, origin first.
fn box_points(d: usize, span: i64) -> Vec<Vec<i64>> {
    let side = (span + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut i| {
            let mut x = vec![0i64; d];
            for k in (0..d).rev() {
                x[k] = (i % side) as i64;
                i /= side;
            }
            x
        })
        .collect()
}

/// Lazily enumerates atom configurations: sizes `1..=k`, then position
/// combinations, then weight tuples.
struct Exhaustive<'a> {
    points: &'a [Vec<i64>],
    weights: &'a [f64],
    k_max: usize,
    k: usize,
    combo: Vec<usize>,
    wsel: Vec<usize>,
    done: bool,
}

impl<'a> Exhaustive<'a> {
    fn new(points: &'a [Vec<i64>], weights: &'a [f64], k_max: usize) -> Self {
        Self {
            points,
            weights,
            k_max,
            k: 1,
            combo: Vec::new(),
            wsel: Vec::new(),
            done: k_max == 0 || points.is_empty(),
        }
    }

    fn advance_weights(&mut self) -> bool {
        for i in (0..self.wsel.len()).rev() {
            if self.wsel[i] + 1 < self.weights.len() {
                self.wsel[i] += 1;
                for w in &mut self.wsel[i + 1..] {
                    *w = 0;
                }
                return true;
            }
        }
        false
    }

    /// Next combination of indices in `1..n`; index 0 is the origin.
    fn advance_combo(&mut self) -> bool {
        let n = self.points.len();
        let r = self.combo.len();
        for i in (0..r).rev() {
            if self.combo[i] < n - r + i {
                self.combo[i] += 1;
                for j in i + 1..r {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn advance(&mut self) {
        if self.advance_weights() {
            return;
        }
        if self.advance_combo() {
            self.wsel.iter_mut().for_each(|w| *w = 0);
            return;
        }
        self.k += 1;
        if self.k > self.k_max || self.k > self.points.len() {
            self.done = true;
            return;
        }
        self.combo = (1..self.k).collect();
        self.wsel = vec![0; self.k - 1];
    }
}

impl Iterator for Exhaustive<'_> {
    type Item = Atoms;

    fn next(&mut self) -> Option<Atoms> {
        if self.done {
            return None;
        }
        let mut atoms = vec![(self.points[0].clone(), 1.0)];
        for (c, w) in self.combo.iter().zip(&self.wsel) {
            atoms.push((self.points[*c].clone(), self.weights[*w]));
        }
        self.advance();
        Some(atoms)
    }
}

const CHUNK: usize = 4096;

/// Best weak ratio over small atom sums, then local perturbation of the best
/// configuration. Deterministic for a given seed; never fails on budget.
pub fn search_weak_constant(body: &BodySpec, config: &SearchConfig) -> Result<ConstantEstimate> {
    if config.atoms_max == 0 || config.radius < 0 || config.weights.is_empty() {
        return Err(invalid("config", "need atoms_max >= 1, radius >= 0 and a weight grid"));
    }
    if config.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(invalid("weights", "weight grid must be positive"));
    }
    let selector = ScaleSelector::All {
        t_max: config.effective_t_max(),
    };
    let plan = MaximalPlan::new(body, &selector)?;
    let d = body.dim();
    let points = box_points(d, 2 * config.radius);
    let mut trace = SearchTrace::default();
    let mut best: Option<Candidate> = None;

    let consider = |c: Option<Candidate>, trace: &mut SearchTrace, best: &mut Option<Candidate>| {
        if let Some(c) = c {
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                trace.improvements.push((trace.evaluations, c.score.ratio));
                *best = Some(c);
            }
        }
    };

    let structured_budget = config.budget - config.budget / 10;
    let train_max = if d == 1 { config.train_max } else { 0 };
    let trains = (2..=train_max).flat_map(|k| {
        (1..=2 * config.radius.max(1)).map(move |s| (0..k as i64).map(|j| (vec![j * s; 1], 1.0)).collect::<Atoms>())
    });
    let exhaustive = Exhaustive::new(&points, &config.weights, config.atoms_max);
    let mut it = trains.chain(exhaustive).peekable();
    while it.peek().is_some() {
        let room = structured_budget - trace.evaluations;
        if room == 0 {
            trace.budget_exhausted = true;
            break;
        }
        let chunk: Vec<Atoms> = it.by_ref().take(CHUNK.min(room as usize)).collect();
        let n = chunk.len() as u64;
        let c = best_of(&plan, chunk);
        trace.evaluations += n;
        trace.structured_evaluations += n;
        consider(c, &mut trace, &mut best);
    }

    let mut round = 0u64;
    let batch = config.batch.max(1);
    while let Some(current) = best.clone() {
        let room = config.budget - trace.evaluations;
        if room == 0 {
            break;
        }
        let n = (batch as u64).min(room);
        let proposals: Vec<Atoms> = (0..n)
            .map(|j| perturb(&current.atoms, config, d, round * batch as u64 + j))
            .collect();
        let c = best_of(&plan, proposals);
        trace.evaluations += n;
        trace.local_evaluations += n;
        consider(c, &mut trace, &mut best);
        round += 1;
    }

    let best = best.ok_or_else(|| invalid("config", "no candidate could be evaluated"))?;
    let witness = LatticeFunction::from_atoms(d, &best.atoms)?;
    Ok(ConstantEstimate {
        version: RECORD_VERSION,
        kind: ConstantKind::Weak11,
        body: body.clone(),
        selector,
        lower_bound: best.score.ratio,
        witness,
        witness_level: Some(best.score.level),
        seed: Some(config.seed),
        search_trace: Some(trace),
        created_unix: None,
    })
}

/// One random local move, drawn from the counter stream `index`.
fn perturb(atoms: &Atoms, config: &SearchConfig, d: usize, index: u64) -> Atoms {
    let mut rng = stream(config.seed, index);
    let mut a = atoms.clone();
    let span = config.radius.max(1);
    match rng.random_range(0..4u32) {
        0 => {
            let i = rng.random_range(0..a.len());
            let axis = rng.random_range(0..d);
            let mut step = rng.random_range(1..=3i64);
            if rng.random::<bool>() {
                step = -step;
            }
            a[i].0[axis] += step;
        }
        1 => {
            let i = rng.random_range(0..a.len());
            a[i].1 *= rng.random_range(-0.5..0.5f64).exp();
        }
        2 if a.len() < config.atoms_max.max(config.train_max) => {
            let x: Vec<i64> = (0..d)
                .map(|k| {
                    let lo = a.iter().map(|p| p.0[k]).min().unwrap_or(0) - span;
                    let hi = a.iter().map(|p| p.0[k]).max().unwrap_or(0) + span;
                    rng.random_range(lo..=hi)
                })
                .collect();
            a.push((x, rng.random_range(0.05..1.0f64)));
        }
        3 if a.len() > 1 => {
            let i = rng.random_range(0..a.len());
            a.remove(i);
        }
        _ => {
            let i = rng.random_range(0..a.len());
            a[i].1 *= rng.random_range(-0.1..0.1f64).exp();
        }
    }
    a.sort_by(|p, q| p.0.cmp(&q.0));
    a.dedup_by(|p, q| {
        if p.0 == q.0 {
            q.1 += p.1;
            true
        } else {
            false
        }
    });
    // Scale the largest weight to 1 and translate the lexicographically
    // smallest atom to the origin; the ratio is invariant under both.
    let top = a.iter().fold(0.0f64, |m, p| m.max(p.1));
    for p in &mut a {
        p.1 /= top;
    }
    let base = a[0].0.clone();
    for (x, _) in &mut a {
        for k in 0..d {
            x[k] -= base[k];
        }
    }
    a
}
