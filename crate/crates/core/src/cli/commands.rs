use serde_json::{json, Value};

use super::args::*;
use crate::constants::{
    check_step_extension, melas_constant, sample_and_compare, search_weak_constant, triangular_bump, ConstantEstimate,
    SearchConfig,
};
use crate::error::{invalid, Result};
use crate::function::LatticeFunction;
use crate::geometry::{ball_volume, lattice_count};
use crate::multiplier::{
    check_head_multiplier, continuous_multiplier, sample_frequency, verify_prop1, FrequencyPoint, MultiplierPlan,
};
use crate::operators::{average, maximal, semigroup_apply, square_function};
use crate::report::{Verdict, VerificationReport};
use crate::verify::{
    a_q, c_tilde, check_count_volume, check_cube_slice, check_hanner, check_shift_difference, check_small_head_mass,
    check_sparse_large_coordinates, slice_series, slice_threshold, monte_carlo_permutations, PermutationCase,
    SliceCase,
};

/// What a subcommand produced: a table, its JSON form (one record per
/// element when an array), a one-line summary, and whether an in-regime
/// assertion failed.
pub struct Artifact {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    pub summary: String,
    pub failed: bool,
}

impl Artifact {
    fn table(header: &[&str], rows: Vec<Vec<String>>, json: Value, summary: String) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            json,
            summary,
            failed: false,
        }
    }

    pub(super) fn csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
    }
}

pub(super) fn num(v: f64) -> String {
    format!("{v:?}")
}

fn function_artifact(f: &LatticeFunction, summary: String) -> Result<Artifact> {
    let mut header: Vec<String> = (0..f.dim()).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    let rows = f
        .iter()
        .map(|(x, v)| {
            let mut r: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            r.push(num(v));
            r
        })
        .collect();
    Ok(Artifact {
        header,
        rows,
        json: serde_json::to_value(f)?,
        summary,
        failed: false,
    })
}

fn atoms_string(f: &LatticeFunction) -> String {
    f.iter()
        .filter(|(_, v)| *v != 0.0)
        .map(|(x, v)| {
            let xs: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            format!("{}:{}", xs.join(","), num(v))
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn count(a: &CountArgs) -> Result<Artifact> {
    let body = a.body.build()?;
    let c = lattice_count(&body, a.t)?;
    let row = vec![
        format!("{:?}", a.body.body).to_lowercase(),
        num(body.exponent()),
        body.dim().to_string(),
        num(a.t),
        c.count.to_string(),
        c.exact.to_string(),
    ];
    let json = json!({"body": body, "t": a.t, "count": c.count.to_string(), "exact": c.exact});
    Ok(Artifact::table(&["body", "q", "d", "t", "count", "exact"], vec![row], json, c.count.to_string()))
}

pub fn volume(a: &VolumeArgs) -> Result<Artifact> {
    let v = ball_volume(a.q, a.dim, a.radius)?;
    let value = v.to_f64().ok();
    let row = vec![
        num(a.q),
        a.dim.to_string(),
        num(a.radius),
        num(v.ln()),
        value.map(num).unwrap_or_default(),
    ];
    let summary = value.map(num).unwrap_or_else(|| format!("exp({})", num(v.ln())));
    let json = json!({"q": a.q, "d": a.dim, "radius": a.radius, "ln_volume": v.ln(), "volume": value});
    Ok(Artifact::table(&["q", "d", "radius", "ln_volume", "volume"], vec![row], json, summary))
}

pub fn average_cmd(a: &AverageArgs, seed: u64) -> Result<Artifact> {
    let body = a.body.build()?;
    let f = a.function.build(body.dim(), seed)?;
    let out = average(&body, a.t, &f)?;
    let s = format!("average at t = {}: {} cells", a.t, out.len());
    function_artifact(&out, s)
}

pub fn maximal_cmd(a: &MaximalArgs, seed: u64) -> Result<Artifact> {
    let body = a.body.build()?;
    let f = a.function.build(body.dim(), seed)?;
    let out = maximal(&body, &a.selector.build()?, &f)?;
    let s = format!("maximal function: {} cells, sup {}", out.len(), num(out.max_abs()));
    function_artifact(&out, s)
}

pub fn semigroup_cmd(a: &SemigroupArgs, seed: u64) -> Result<Artifact> {
    let f = a.function.build(a.dim, seed)?;
    let out = semigroup_apply(a.t, &f)?;
    let s = format!("semigroup at t = {}: mass {}", a.t, num(out.sum()));
    function_artifact(&out, s)
}

pub fn squarefn_cmd(a: &SquarefnArgs, seed: u64) -> Result<Artifact> {
    let f = a.function.build(a.dim, seed)?;
    let out = square_function(a.q, a.c1, a.c2, &f)?;
    let ratio = out.norm(2.0)? / f.norm(2.0)?;
    function_artifact(&out, format!("square function: l2 ratio {}", num(ratio)))
}

pub(super) fn search_config(s: &SearchArgs, atoms_max: usize, seed: u64) -> Result<SearchConfig> {
    Ok(SearchConfig {
        atoms_max,
        radius: s.radius,
        weights: parse_list(&s.weight_grid, "weight-grid")?,
        train_max: s.train_max,
        budget: s.budget,
        t_max: s.search_t_max,
        seed,
        batch: s.batch,
    })
}

pub const ESTIMATE_HEADER: [&str; 6] = ["kind", "lower_bound", "witness_level", "evaluations", "budget_exhausted", "witness"];

pub(super) fn estimate_row(e: &ConstantEstimate) -> Vec<String> {
    let kind = serde_json::to_value(&e.kind)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(String::from))
        .unwrap_or_default();
    let trace = e.search_trace.as_ref();
    vec![
        kind,
        num(e.lower_bound),
        e.witness_level.map(num).unwrap_or_default(),
        trace.map(|t| t.evaluations.to_string()).unwrap_or_default(),
        trace.map(|t| t.budget_exhausted.to_string()).unwrap_or_default(),
        atoms_string(&e.witness),
    ]
}

pub fn constant(a: &ConstantArgs, seed: u64) -> Result<Artifact> {
    let body = a.body.build()?;
    let est = match a.kind {
        ConstantKindArg::Weak11 => search_weak_constant(&body, &search_config(&a.search, a.search.atoms_max, seed)?)?,
        ConstantKindArg::Strong => {
            let f = a.function.build(body.dim(), seed)?;
            ConstantEstimate::strong(&body, &a.selector.build()?, &f, a.p)?
        }
    };
    let mut summary = format!("lower bound {}", num(est.lower_bound));
    if a.kind == ConstantKindArg::Weak11 && body.dim() == 1 {
        summary += &format!(" (one-dimensional barrier {})", num(melas_constant()));
    }
    summary += &format!("; witness {}", atoms_string(&est.witness));
    Ok(Artifact::table(
        &ESTIMATE_HEADER,
        vec![estimate_row(&est)],
        serde_json::to_value(&est)?,
        summary,
    ))
}

fn reports_artifact(reports: Vec<VerificationReport>) -> Result<Artifact> {
    let failed = reports.iter().any(|r| r.verdict == Verdict::Fail);
    let summary = reports
        .iter()
        .map(|r| {
            let v = serde_json::to_value(r.verdict).ok();
            format!("{}: {}", r.check_name, v.as_ref().and_then(|v| v.as_str()).unwrap_or(""))
        })
        .collect::<Vec<_>>()
        .join("; ");
    let rows = reports.iter().map(|r| r.csv_row()).collect();
    let json = Value::Array(reports.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?);
    let mut art = Artifact::table(&VerificationReport::CSV_HEADER, rows, json, summary);
    art.failed = failed;
    Ok(art)
}

pub fn transfer(a: &TransferArgs, seed: u64) -> Result<Artifact> {
    let report = match a.check {
        TransferCheck::StepExtension => {
            let f = a.function.build(a.body.dim, seed)?;
            check_step_extension(&f, a.delta, a.h.unwrap_or(0.1))?
        }
        TransferCheck::Sampling => {
            let body = a.body.build()?;
            let bump = triangular_bump(body.dim(), a.h.unwrap_or(1.0 / a.k.max(1) as f64))?;
            sample_and_compare(&bump, a.k, &body, a.eta)?
        }
    };
    reports_artifact(vec![report])
}

pub fn multiplier_cmd(a: &MultiplierArgs, seed: u64) -> Result<Artifact> {
    let body = a.body.build()?;
    let d = body.dim();
    let points: Vec<FrequencyPoint> = match &a.xi {
        Some(s) => {
            let xi: Vec<f64> = parse_list(s, "xi")?;
            if xi.len() != d {
                return Err(invalid("xi", format!("need {d} coordinates, got {}", xi.len())));
            }
            vec![FrequencyPoint::new(xi)]
        }
        None => (0..a.samples).map(|i| sample_frequency(d, seed, i)).collect(),
    };
    let values: Vec<f64> = if a.continuous {
        points
            .iter()
            .map(|p| continuous_multiplier(body.exponent(), a.n, p.xi()))
            .collect::<Result<_>>()?
    } else {
        let plan = MultiplierPlan::new(&body, a.n)?;
        points.iter().map(|p| plan.eval(p)).collect::<Result<_>>()?
    };
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (p, v))| {
            let xs: Vec<String> = p.xi().iter().map(|c| num(*c)).collect();
            vec![i.to_string(), xs.join(" "), num(p.torus_norm()), num(*v)]
        })
        .collect();
    let json = Value::Array(
        points
            .iter()
            .zip(&values)
            .map(|(p, v)| json!({"xi": p.xi(), "torus_norm": p.torus_norm(), "value": v}))
            .collect(),
    );
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Artifact::table(
        &["index", "xi", "torus_norm", "value"],
        rows,
        json,
        format!("{} frequencies, sup |m| = {}", values.len(), num(sup)),
    ))
}

fn index_set(s: &Option<String>, d: usize, name: &'static str) -> Result<Vec<usize>> {
    match s {
        Some(s) => parse_list(s, name),
        None => Ok((1..=d).collect()),
    }
}

pub fn verify(a: &VerifyArgs, seed: u64) -> Result<Artifact> {
    let integer = |name: &'static str, v: f64| -> Result<u64> {
        if v.fract() == 0.0 && v >= 0.0 {
            Ok(v as u64)
        } else {
            Err(invalid(name, format!("this suite needs an integer, got {v}")))
        }
    };
    let reports = match a.suite {
        Suite::Prop1 => vec![verify_prop1(a.q, a.dim, a.n, a.samples, seed)?],
        Suite::HeadMultiplier => {
            let q = integer("q", a.q)? as u32;
            vec![check_head_multiplier(q, a.dim, integer("N", a.n)?, a.r, a.eps, a.samples, seed)?]
        }
        Suite::Series => {
            let p = || crate::params! {"q" => a.q};
            let m = |name: &str, v: f64| VerificationReport::measurement(name, p(), v, crate::report::Oracle::Exact);
            let s = slice_series(a.q);
            vec![
                m("c_tilde", c_tilde(a.q)),
                m("a_q", a_q(a.q)),
                m("slice_series", s.sum).with_detail(format!("tail bound {}", num(s.tail_bound))),
                m("slice_largeness", slice_threshold(a.q, a.a, a.dim))
                    .with_detail(format!("a = {}, d = {}; must be <= 1/2", a.a, a.dim)),
            ]
        }
        Suite::Hanner => vec![check_hanner(a.q, a.dim, a.n, a.samples, seed)?],
        Suite::CountVolume => check_count_volume(a.q, a.dim, a.n)?,
        Suite::SparseCoordinates => {
            vec![check_sparse_large_coordinates(integer("q", a.q)? as u32, a.dim, a.n, a.eps1, a.eps2)?]
        }
        Suite::HeadMass => vec![check_small_head_mass(integer("q", a.q)? as u32, a.dim, a.n, a.eps, a.r)?],
        Suite::CubeSlice => {
            let case = SliceCase { q: a.q, d: a.dim, n: a.n, a: a.a, j: a.shell };
            vec![check_cube_slice(case, a.points, a.trials, seed)?]
        }
        Suite::Shift => {
            let z: Vec<f64> = match &a.z {
                Some(s) => parse_list(s, "z")?,
                None => vec![0.0; a.r],
            };
            check_shift_difference(a.q, a.r, a.n, a.delta, &z)?
        }
        Suite::Permutations => {
            let u = match &a.u {
                Some(s) => parse_list(s, "u")?,
                None => vec![0.0; a.dim],
            };
            let case = PermutationCase::new(
                a.dim,
                index_set(&a.i_set, a.dim, "i-set")?,
                index_set(&a.j_set, a.dim, "j-set")?,
                u,
                a.delta0,
                a.delta1,
            )?;
            monte_carlo_permutations(&case, a.trials, seed)?
        }
    };
    reports_artifact(reports)
}
