//! Finitely supported functions on `Z^d` and grid samples on `hZ^d`.
//!
//! Both types store a dense row-major block (last axis fastest) over an
//! integer box. They share a little-endian binary layout:
//!
//! | field   | type            |
//! |---------|-----------------|
//! | magic   | `b"DMXF"`       |
//! | version | `u16` (1)       |
//! | kind    | `u8` (0 lattice, 1 grid) |
//! | pad     | `u8`            |
//! | d       | `u32`           |
//! | offset  | `d × i64`       |
//! | shape   | `d × u64`       |
//! | mesh    | `f64` (1 for lattice functions) |
//! | values  | `Π shape × f64` |

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const MAGIC: &[u8; 4] = b"DMXF";
const VERSION: u16 = 1;
/// Largest dense block any function may allocate.
pub const MAX_CELLS: usize = 1 << 28;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeFunction {
    offset: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

pub(crate) fn cell_count(shape: &[usize]) -> Result<usize> {
    let mut n = 1usize;
    for &s in shape {
        n = n.checked_mul(s).filter(|&n| n <= MAX_CELLS).ok_or(Error::BudgetExceeded {
            what: "support box",
            limit: MAX_CELLS as u128,
        })?;
    }
    Ok(n)
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

impl LatticeFunction {
    pub fn new(offset: Vec<i64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if offset.is_empty() {
            return Err(invalid("offset", "dimension must be positive"));
        }
        if offset.len() != shape.len() {
            return Err(Error::DimensionMismatch {
                expected: offset.len(),
                got: shape.len(),
            });
        }
        let n = cell_count(&shape)?;
        if values.len() != n {
            return Err(invalid(
                "values",
                format!("box holds {n} cells but {} values were given", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "values must be finite"));
        }
        Ok(Self {
            offset,
            shape,
            values,
        })
    }

    pub fn zeros(offset: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        let n = cell_count(&shape)?;
        Self::new(offset, shape, vec![0.0; n])
    }

    /// `δ_0` in dimension `d`.
    pub fn delta(d: usize) -> Self {
        Self::new(vec![0; d], vec![1; d], vec![1.0]).expect("valid delta")
    }

    /// Sum of weighted Dirac masses on the tightest enclosing box.
    pub fn from_atoms(d: usize, atoms: &[(Vec<i64>, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("atoms", "need at least one atom"));
        }
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for (x, _) in atoms {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            for i in 0..d {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i]);
            }
        }
        let shape = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut f = Self::zeros(lo, shape)?;
        for (x, v) in atoms {
            let i = f.index_of(x).expect("inside box");
            f.values[i] += v;
        }
        if f.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("atoms", "atom weights must be finite"));
        }
        Ok(f)
    }

    /// Indicator of the integer box `offset + [0, shape)`.
    pub fn indicator(offset: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        let n = cell_count(&shape)?;
        Self::new(offset, shape, vec![1.0; n])
    }

    /// Independent uniform `[0, 1)` values, reproducible from `seed`.
    pub fn random(offset: Vec<i64>, shape: Vec<usize>, seed: u64) -> Result<Self> {
        let n = cell_count(&shape)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n).map(|_| rng.random::<f64>()).collect();
        Self::new(offset, shape, values)
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat index of `x`, or `None` outside the box.
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for i in 0..self.dim() {
            let r = x[i] - self.offset[i];
            if r < 0 || r as usize >= self.shape[i] {
                return None;
            }
            idx = idx * self.shape[i] + r as usize;
        }
        Some(idx)
    }

    /// Lattice point at flat index `i`.
    pub fn point(&self, mut i: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.dim()];
        for k in (0..self.dim()).rev() {
            x[k] = self.offset[k] + (i % self.shape[k]) as i64;
            i /= self.shape[k];
        }
        x
    }

    /// `f(x)`, zero outside the box.
    pub fn get(&self, x: &[i64]) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.point(i), v))
    }

    /// `ℓ^p` norm for `p ∈ [1, ∞]`.
    pub fn norm(&self, p: f64) -> Result<f64> {
        lp_norm(&self.values, p, 1.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn translated(&self, shift: &[i64]) -> Self {
        Self {
            offset: self.offset.iter().zip(shift).map(|(o, s)| o + s).collect(),
            ..self.clone()
        }
    }

    /// Smallest box holding every nonzero value; `None` for the zero function.
    pub fn trimmed(&self) -> Option<Self> {
        let atoms: Vec<_> = self.iter().filter(|(_, v)| *v != 0.0).collect();
        Self::from_atoms(self.dim(), &atoms).ok()
    }

    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        write_layout(w, 0, &self.offset, &self.shape, 1.0, &self.values)
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Self> {
        let (kind, offset, shape, _, values) = read_layout(r)?;
        if kind != 0 {
            return Err(Error::Format("expected a lattice function record".into()));
        }
        Self::new(offset, shape, values)
    }

    /// Rows `x0,…,x{d-1},value`, one per cell.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim()).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        wr.write_record(&header)?;
        for (x, v) in self.iter() {
            let mut row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            row.push(format_f64(v));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads rows `x0,…,x{d-1},value` (any subset of points) as atoms.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let d = rd
            .headers()?
            .len()
            .checked_sub(1)
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Format("need columns x0..x{d-1},value".into()))?;
        let mut atoms = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let parse_err = |s: &str| Error::Format(format!("bad number `{s}`"));
            let x = (0..d)
                .map(|i| rec[i].trim().parse::<i64>().map_err(|_| parse_err(&rec[i])))
                .collect::<Result<Vec<_>>>()?;
            let v: f64 = rec[d].trim().parse().map_err(|_| parse_err(&rec[d]))?;
            atoms.push((x, v));
        }
        Self::from_atoms(d, &atoms)
    }
}

/// Samples of a function on `hZ^d`: cell `n` sits at `x = n·h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    offset: Vec<i64>,
    shape: Vec<usize>,
    h: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(offset: Vec<i64>, shape: Vec<usize>, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("h", format!("mesh must be positive, got {h}")));
        }
        let inner = LatticeFunction::new(offset, shape, values)?;
        Ok(Self {
            offset: inner.offset,
            shape: inner.shape,
            h,
            values: inner.values,
        })
    }

    /// Samples `f` on every grid point of the box `[lo, hi]^d`.
    pub fn sample(d: usize, lo: f64, hi: f64, h: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if !(h > 0.0) || !(hi >= lo) {
            return Err(invalid("grid", "need h > 0 and hi >= lo"));
        }
        let n0 = (lo / h - 1e-9).ceil() as i64;
        let n1 = (hi / h + 1e-9).floor() as i64;
        let shape = vec![(n1 - n0 + 1) as usize; d];
        let n = cell_count(&shape)?;
        let mut g = Self::new(vec![n0; d], shape, h, vec![0.0; n])?;
        for i in 0..n {
            let x = g.position(i);
            g.values[i] = f(&x);
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "sampled values must be finite"));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn mesh(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Integer grid index of flat cell `i`.
    pub fn node(&self, mut i: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.dim()];
        for k in (0..self.dim()).rev() {
            x[k] = self.offset[k] + (i % self.shape[k]) as i64;
            i /= self.shape[k];
        }
        x
    }

    /// Physical position `n·h` of flat cell `i`.
    pub fn position(&self, i: usize) -> Vec<f64> {
        self.node(i).iter().map(|&n| n as f64 * self.h).collect()
    }

    pub fn index_of(&self, n: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for i in 0..self.dim() {
            let r = n[i] - self.offset[i];
            if r < 0 || r as usize >= self.shape[i] {
                return None;
            }
            idx = idx * self.shape[i] + r as usize;
        }
        Some(idx)
    }

    /// Value at grid node `n`, zero outside the box.
    pub fn get(&self, n: &[i64]) -> f64 {
        self.index_of(n).map_or(0.0, |i| self.values[i])
    }

    /// Value at physical `x`, which must lie on the grid within `1e-9·h`.
    pub fn at(&self, x: &[f64]) -> Option<f64> {
        let n: Vec<i64> = x.iter().map(|v| (v / self.h).round() as i64).collect();
        let on_grid = n
            .iter()
            .zip(x)
            .all(|(&k, v)| (k as f64 * self.h - v).abs() <= 1e-9 * self.h);
        on_grid.then(|| self.get(&n))
    }

    /// `L^p` norm with quadrature weight `h^d` per sample.
    pub fn norm(&self, p: f64) -> Result<f64> {
        lp_norm(&self.values, p, self.h.powi(self.dim() as i32))
    }

    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        write_layout(w, 1, &self.offset, &self.shape, self.h, &self.values)
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Self> {
        let (kind, offset, shape, h, values) = read_layout(r)?;
        if kind != 1 {
            return Err(Error::Format("expected a grid function record".into()));
        }
        Self::new(offset, shape, h, values)
    }

    /// Rows `x0,…,x{d-1},value` with physical coordinates.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim()).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        wr.write_record(&header)?;
        for (i, &v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self.position(i).into_iter().map(format_f64).collect();
            row.push(format_f64(v));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub(crate) fn from_parts(offset: Vec<i64>, shape: Vec<usize>, h: f64, values: Vec<f64>) -> Self {
        Self {
            offset,
            shape,
            h,
            values,
        }
    }
}

fn lp_norm(values: &[f64], p: f64, weight: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("need p in [1, inf], got {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let m = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (s * weight).powf(1.0 / p))
}

/// Shortest representation that round-trips.
pub(crate) fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn write_layout<W: Write>(
    mut w: W,
    kind: u8,
    offset: &[i64],
    shape: &[usize],
    h: f64,
    values: &[f64],
) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 16 * offset.len() + 8 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind);
    buf.push(0);
    buf.extend_from_slice(&(offset.len() as u32).to_le_bytes());
    for o in offset {
        buf.extend_from_slice(&o.to_le_bytes());
    }
    for s in shape {
        buf.extend_from_slice(&(*s as u64).to_le_bytes());
    }
    buf.extend_from_slice(&h.to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

type Layout = (u8, Vec<i64>, Vec<usize>, f64, Vec<f64>);

fn read_layout<R: Read>(mut r: R) -> Result<Layout> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = head[6];
    let d = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    if d == 0 || d > 64 {
        return Err(Error::Format(format!("implausible dimension {d}")));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let offset = (0..d)
        .map(|_| next(&mut r).map(i64::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    let shape = (0..d)
        .map(|_| next(&mut r).map(|b| u64::from_le_bytes(b) as usize))
        .collect::<Result<Vec<_>>>()?;
    let h = f64::from_le_bytes(next(&mut r)?);
    let n = cell_count(&shape)?;
    let values = (0..n)
        .map(|_| next(&mut r).map(f64::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    Ok((kind, offset, shape, h, values))
}
