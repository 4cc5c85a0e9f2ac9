use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::function::LatticeFunction;
use crate::geometry::BodySpec;
use crate::operators::ScaleSelector;

#[derive(Parser, Debug, Serialize)]
#[command(name = "dmax", version, about = "Discrete maximal functions over convex bodies", args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` file of flag defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Artifact path; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Exact lattice-point count of a dilate.
    Count(CountArgs),
    /// Volume of a q-ball.
    Volume(VolumeArgs),
    /// Average over one dilate.
    Average(AverageArgs),
    /// Maximal function over a scale set.
    Maximal(MaximalArgs),
    /// Heat semigroup evolution.
    Semigroup(SemigroupArgs),
    /// Square function over a dyadic window.
    Squarefn(SquarefnArgs),
    /// Lower bounds for maximal-function constants.
    Constant(ConstantArgs),
    /// Step-extension and sampling checks between discrete and continuous operators.
    Transfer(TransferArgs),
    /// Fourier multipliers of the averages.
    Multiplier(MultiplierArgs),
    /// Inequality checks.
    Verify(VerifyArgs),
    /// Parameter sweeps, one CSV row per grid point.
    Sweep(SweepArgs),
}

impl Command {
    pub const NAMES: [&'static str; 11] = [
        "count",
        "volume",
        "average",
        "maximal",
        "semigroup",
        "squarefn",
        "constant",
        "transfer",
        "multiplier",
        "verify",
        "sweep",
    ];
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKindArg {
    Qball,
    Cube,
    Ellipsoid,
}

#[derive(Args, Debug, Serialize)]
pub struct BodyArgs {
    #[arg(long, value_enum, default_value_t = BodyKindArg::Qball)]
    pub body: BodyKindArg,
    /// Exponent of the q-ball (`inf` for the cube).
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Ellipsoid semi-axis weights, comma separated; an evenly spaced family
    /// member when absent.
    #[arg(long)]
    pub weights: Option<String>,
}

impl BodyArgs {
    pub fn build(&self) -> Result<BodySpec> {
        match self.body {
            BodyKindArg::Qball if self.q.is_infinite() => cube(self.dim),
            BodyKindArg::Qball => BodySpec::qball(self.q, self.dim),
            BodyKindArg::Cube => cube(self.dim),
            BodyKindArg::Ellipsoid => match &self.weights {
                Some(w) => {
                    let w: Vec<f64> = parse_list(w, "weights")?;
                    if w.len() != self.dim {
                        return Err(invalid("weights", format!("need {} weights, got {}", self.dim, w.len())));
                    }
                    BodySpec::ellipsoid(w)
                }
                None => BodySpec::ellipsoid_family_default(self.dim),
            },
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalesArg {
    All,
    GreaterThan,
    Dyadic,
    Explicit,
}

#[derive(Args, Debug, Serialize)]
pub struct SelectorArgs {
    #[arg(long, value_enum, default_value_t = ScalesArg::All)]
    pub scales: ScalesArg,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Lower cutoff D for `greater-than`.
    #[arg(long, default_value_t = 0.0)]
    pub above: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 10.0)]
    pub c2: f64,
    /// Scales for `explicit`, comma separated.
    #[arg(long)]
    pub list: Option<String>,
}

impl SelectorArgs {
    pub fn build(&self) -> Result<ScaleSelector> {
        Ok(match self.scales {
            ScalesArg::All => ScaleSelector::All { t_max: self.t_max },
            ScalesArg::GreaterThan => ScaleSelector::GreaterThan {
                d: self.above,
                t_max: self.t_max,
            },
            ScalesArg::Dyadic => ScaleSelector::DyadicWindow { c1: self.c1, c2: self.c2 },
            ScalesArg::Explicit => ScaleSelector::Explicit {
                scales: parse_list(self.list.as_deref().unwrap_or(""), "list")?,
            },
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Delta,
    Indicator,
    Random,
}

/// Where the input function comes from: inline atoms, a file, or a
/// generator on the box `[-side, side]^d`.
#[derive(Args, Debug, Serialize)]
pub struct FunctionArgs {
    /// Atoms `x1,..,xd:w` separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub atoms: Option<String>,
    /// Function file: `.csv` rows `x0,..,value` or the binary layout.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Generator::Delta)]
    pub generator: Generator,
    #[arg(long, default_value_t = 3)]
    pub side: usize,
}

impl FunctionArgs {
    pub fn build(&self, d: usize, seed: u64) -> Result<LatticeFunction> {
        if d == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if let Some(a) = &self.atoms {
            return LatticeFunction::from_atoms(d, &parse_atoms(a, d)?);
        }
        if let Some(p) = &self.input {
            let file = std::fs::File::open(p)?;
            let f = if p.extension().is_some_and(|e| e == "csv") {
                LatticeFunction::read_csv(file)?
            } else {
                LatticeFunction::read_binary(std::io::BufReader::new(file))?
            };
            if f.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: f.dim() });
            }
            return Ok(f);
        }
        let s = self.side as i64;
        let (offset, shape) = (vec![-s; d], vec![2 * self.side + 1; d]);
        match self.generator {
            Generator::Delta => Ok(LatticeFunction::delta(d)),
            Generator::Indicator => LatticeFunction::indicator(offset, shape),
            Generator::Random => LatticeFunction::random(offset, shape, seed),
        }
    }
}

/// The cube, with `dim = 0` reported as a usage error.
pub fn cube(dim: usize) -> Result<BodySpec> {
    if dim == 0 {
        return Err(invalid("dim", "dimension must be positive"));
    }
    Ok(BodySpec::cube(dim))
}

pub fn parse_list<T: FromStr>(s: &str, name: &'static str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| invalid(name, format!("cannot parse `{p}`"))))
        .collect()
}

pub fn parse_atoms(s: &str, d: usize) -> Result<Vec<(Vec<i64>, f64)>> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (x, w) = p.split_once(':').unwrap_or((p, "1"));
            let x: Vec<i64> = parse_list(x, "atoms")?;
            if x.len() != d {
                return Err(invalid("atoms", format!("atom `{p}` needs {d} coordinates")));
            }
            let w: f64 = w.trim().parse().map_err(|_| invalid("atoms", format!("bad weight in `{p}`")))?;
            Ok((x, w))
        })
        .collect()
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[arg(long)]
    pub t: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct VolumeArgs {
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub radius: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct AverageArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct MaximalArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SemigroupArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SquarefnArgs {
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 10.0)]
    pub c2: f64,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKindArg {
    Weak11,
    Strong,
}

/// Search settings shared by `constant` and the constant sweep.
#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub atoms_max: usize,
    #[arg(long, default_value_t = 20)]
    pub radius: i64,
    /// Weight grid, comma separated.
    #[arg(long, default_value = "1")]
    pub weight_grid: String,
    #[arg(long, default_value_t = 0)]
    pub train_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Largest scale of the weak search; 6·radius when absent.
    #[arg(long)]
    pub search_t_max: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstantArgs {
    #[arg(long, value_enum, default_value_t = ConstantKindArg::Weak11)]
    pub kind: ConstantKindArg,
    /// Exponent of the strong ratio.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[command(flatten)]
    pub body: BodyArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferCheck {
    /// Step extension dominates the discrete maximal function.
    StepExtension,
    /// Sampling a slowly varying bump at `n/K`.
    Sampling,
}

#[derive(Args, Debug, Serialize)]
pub struct TransferArgs {
    #[arg(long, value_enum, default_value_t = TransferCheck::StepExtension)]
    pub check: TransferCheck,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Grid mesh; defaults to 0.1 for the step extension and 1/K for
    /// sampling.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub k: u64,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[command(flatten)]
    pub body: BodyArgs,
    #[command(flatten)]
    pub function: FunctionArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct MultiplierArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    /// Radius of the dilate.
    #[arg(long = "N", alias = "n")]
    pub n: f64,
    /// One frequency, comma separated; otherwise `samples` seeded draws.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub samples: u64,
    /// Continuous ball multiplier instead of the lattice one (d <= 3).
    #[arg(long)]
    pub continuous: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Multiplier bounds near the origin.
    Prop1,
    /// Lower-dimensional multiplier comparison.
    HeadMultiplier,
    /// Series constants at `q`.
    Series,
    Hanner,
    CountVolume,
    SparseCoordinates,
    HeadMass,
    CubeSlice,
    Shift,
    Permutations,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long = "N", alias = "n", default_value_t = 10.0)]
    pub n: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    /// Leading block size `r`.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps2: f64,
    #[arg(long, default_value_t = 12.0)]
    pub a: f64,
    /// Shell index of the cube-slice bound.
    #[arg(long, default_value_t = 0)]
    pub shell: u64,
    #[arg(long, default_value_t = 8)]
    pub points: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Shift vector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Index set I (1-based, comma separated); all of 1..=d when absent.
    #[arg(long)]
    pub i_set: Option<String>,
    /// Index set J; all of 1..=d when absent.
    #[arg(long)]
    pub j_set: Option<String>,
    /// Weights u_1..u_d; zeros when absent.
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub delta0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta1: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Lattice multiplier decay envelope over `dims × ns`.
    Envelope,
    /// Continuous multiplier decay envelope over `dims × ns`.
    ContinuousEnvelope,
    /// Lattice counts over `dims × ns`.
    Count,
    /// Multiplier bounds near the origin over `dims × ns`.
    Prop1,
    /// Weak-constant search over the atom budgets in `atoms`.
    Constant,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: SweepKind,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Dimensions, comma separated; empty for an empty grid.
    #[arg(long, default_value = "")]
    pub dims: String,
    /// Radii, comma separated.
    #[arg(long = "ns", default_value = "")]
    pub ns: String,
    /// Atom budgets of the constant sweep, comma separated.
    #[arg(long, default_value = "")]
    pub atoms: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = BodyKindArg::Cube)]
    pub body: BodyKindArg,
    #[command(flatten)]
    pub search: SearchArgs,
}
