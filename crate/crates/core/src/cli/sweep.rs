use rayon::prelude::*;
use serde_json::{json, Value};

use super::args::{cube, parse_list, BodyKindArg, SweepArgs, SweepKind};
use super::commands::{estimate_row, num, search_config, Artifact, ESTIMATE_HEADER};
use crate::constants::search_weak_constant;
use crate::error::Result;
use crate::geometry::{lattice_count, BodySpec};
use crate::multiplier::{continuous_decay_envelope, verify_prop1, verify_prop2_envelope, EnvelopeReport};

/// One grid point's cells, or the error that stopped it.
type Row = std::result::Result<Vec<String>, String>;

fn grid(a: &SweepArgs) -> Result<Vec<(usize, f64)>> {
    let dims: Vec<usize> = parse_list(&a.dims, "dims")?;
    let ns: Vec<f64> = parse_list(&a.ns, "ns")?;
    Ok(dims.iter().flat_map(|&d| ns.iter().map(move |&n| (d, n))).collect())
}

fn envelope_row(a: &SweepArgs, seed: u64, d: usize, n: f64, continuous: bool) -> Row {
    let rep = if continuous {
        continuous_decay_envelope(a.q, &[(d, n)], a.samples, seed)
    } else {
        verify_prop2_envelope(a.q, &[(d, n)], a.samples, seed)
    }
    .map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    rep.write_csv(&mut buf).map_err(|e| e.to_string())?;
    let mut rd = csv::Reader::from_reader(buf.as_slice());
    let rec = rd.records().next().ok_or("empty envelope")?.map_err(|e| e.to_string())?;
    Ok(rec.iter().map(String::from).collect())
}

/// Runs the sweep; rows follow grid order (dimensions outer, radii inner)
/// whatever order they were computed in, and failed points keep their row
/// with an `error` cell.
pub fn sweep(a: &SweepArgs, seed: u64) -> Result<Artifact> {
    let points = grid(a)?;
    let mut keys: Vec<Vec<String>> = points.iter().map(|&(d, n)| vec![d.to_string(), num(n)]).collect();
    let (mut header, rows): (Vec<String>, Vec<Row>) = match a.kind {
        SweepKind::Envelope | SweepKind::ContinuousEnvelope => {
            let cont = a.kind == SweepKind::ContinuousEnvelope;
            let rows = points.par_iter().map(|&(d, n)| envelope_row(a, seed, d, n, cont)).collect();
            (EnvelopeReport::CSV_HEADER.iter().map(|s| s.to_string()).collect(), rows)
        }
        SweepKind::Count => {
            let rows = points
                .par_iter()
                .map(|&(d, n)| {
                    let body = match a.body {
                        BodyKindArg::Cube => cube(d),
                        BodyKindArg::Qball => BodySpec::qball(a.q, d),
                        BodyKindArg::Ellipsoid => BodySpec::ellipsoid_family_default(d),
                    };
                    let c = body.and_then(|b| lattice_count(&b, n)).map_err(|e| e.to_string())?;
                    Ok(vec![d.to_string(), num(n), c.count.to_string()])
                })
                .collect();
            (vec!["d".into(), "N".into(), "count".into()], rows)
        }
        SweepKind::Prop1 => {
            let rows = points
                .par_iter()
                .map(|&(d, n)| {
                    let r = verify_prop1(a.q, d, n, a.samples, seed).map_err(|e| e.to_string())?;
                    let mut row = vec![d.to_string(), num(n)];
                    row.extend(r.csv_row());
                    Ok(row)
                })
                .collect();
            let mut h = vec!["d".to_string(), "N".to_string()];
            h.extend(crate::report::VerificationReport::CSV_HEADER.iter().map(|s| s.to_string()));
            (h, rows)
        }
        SweepKind::Constant => {
            let body = match a.body {
                BodyKindArg::Qball => BodySpec::qball(a.q, 1)?,
                BodyKindArg::Cube => BodySpec::cube(1),
                BodyKindArg::Ellipsoid => BodySpec::ellipsoid_family_default(1)?,
            };
            let atoms: Vec<usize> = parse_list(&a.atoms, "atoms")?;
            keys = atoms.iter().map(|k| vec![k.to_string()]).collect();
            let found: Vec<std::result::Result<_, String>> = atoms
                .par_iter()
                .map(|&k| {
                    let cfg = search_config(&a.search, k, seed).map_err(|e| e.to_string())?;
                    search_weak_constant(&body, &cfg).map_err(|e| e.to_string())
                })
                .collect();
            // A witness found with k' <= k atoms is admissible for k, so
            // each row reports the best search at or below its budget.
            let rows = atoms
                .iter()
                .zip(&found)
                .map(|(&k, own)| {
                    own.as_ref().map_err(Clone::clone)?;
                    let (from, est) = atoms
                        .iter()
                        .zip(&found)
                        .filter_map(|(&j, f)| f.as_ref().ok().filter(|_| j <= k).map(|e| (j, e)))
                        .fold(None::<(usize, &crate::constants::ConstantEstimate)>, |b, c| match b {
                            Some(b) if b.1.lower_bound >= c.1.lower_bound => Some(b),
                            _ => Some(c),
                        })
                        .expect("own search succeeded");
                    let mut row = vec![k.to_string()];
                    row.extend(estimate_row(est));
                    row.push(from.to_string());
                    Ok(row)
                })
                .collect();
            let mut h = vec!["atoms_max".to_string()];
            h.extend(ESTIMATE_HEADER.iter().map(|s| s.to_string()));
            h.push("witness_search".to_string());
            (h, rows)
        }
    };
    let width = header.len();
    header.push("error".into());
    let mut failed = false;
    let mut errors = 0;
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .zip(keys)
        .map(|(r, key)| match r {
            Ok(mut cells) => {
                failed |= a.kind == SweepKind::Prop1 && cells.last().map(String::as_str) == Some("fail");
                cells.push(String::new());
                cells
            }
            Err(e) => {
                errors += 1;
                let mut cells = key;
                cells.resize(width, String::new());
                cells.push(e);
                cells
            }
        })
        .collect();
    let json = Value::Array(
        rows.iter()
            .map(|r| Value::Object(header.iter().cloned().zip(r.iter().map(|c| json!(c))).collect()))
            .collect(),
    );
    let summary = format!("{} rows, {} failed points", rows.len(), errors);
    Ok(Artifact {
        header,
        rows,
        json,
        summary,
        failed,
    })
}
