use std::process::{Command, Output};

fn dmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmax")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_thirteen() {
    let o = dmax(&["count", "--body", "qball", "--q", "2", "--dim", "2", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "13");
}

#[test]
fn weak_constant_stays_below_barrier() {
    let o = dmax(&[
        "constant", "--kind", "weak11", "--body", "cube", "--dim", "1", "--atoms-max", "3", "--radius", "30", "--seed", "7",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let lb = v["lower_bound"].as_f64().unwrap();
    assert!(lb > 1.0 && lb <= 1.5675209, "{lb}");
    assert!(v["witness"].is_object());
}

#[test]
fn prop1_suite_passes() {
    let o = dmax(&["verify", "--suite", "prop1", "--q", "2", "--dim", "2", "--N", "2", "--samples", "10000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn verify_json_is_one_object_per_report() {
    let o = dmax(&["verify", "--suite", "count-volume", "--q", "2", "--dim", "2", "--N", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let names: Vec<String> = out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["check_name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names.len(), 5);
    assert_eq!(names[0], "count_lower");
}

#[test]
fn envelope_sweep_has_one_row_per_grid_point() {
    let o = dmax(&["sweep", "--kind", "envelope", "--q", "2", "--dims", "1,2,3", "--ns", "12,24,48", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    let keys: Vec<(String, String)> = lines[1..]
        .iter()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[1].to_string())
        })
        .collect();
    assert_eq!(keys[0], ("1".into(), "12.0".into()));
    assert_eq!(keys[8], ("3".into(), "48.0".into()));
}

#[test]
fn empty_grid_gives_header_only() {
    let o = dmax(&["sweep", "--kind", "count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "d,N,count,error\n");
}

#[test]
fn failed_points_keep_their_rows() {
    let o = dmax(&["sweep", "--kind", "count", "--dims", "0,2", "--ns", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,3.0,,") && lines[1].len() > 8);
    // Default body is the unit cube: (2*3+1)^2 points.
    assert_eq!(lines[2], "2,3.0,49,");
}

#[test]
fn constant_sweep_is_monotone_in_atoms() {
    let o = dmax(&["sweep", "--kind", "constant", "--atoms", "1,2,3,4", "--radius", "8", "--budget", "3000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let bounds: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(bounds.len(), 4);
    assert!(bounds.windows(2).all(|w| w[1] >= w[0]), "{bounds:?}");
}

#[test]
fn outputs_are_deterministic_across_thread_budgets() {
    let args = ["multiplier", "--body", "qball", "--q", "3", "--dim", "3", "--N", "6", "--samples", "40", "--seed", "5"];
    let a = dmax(&[&args[..], &["--threads", "1"]].concat());
    let b = dmax(&[&args[..], &["--threads", "1"]].concat());
    let c = dmax(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 41);
}

#[test]
fn config_file_defaults_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# disc\nq = 2\ndim = 2\nt = 5\n").unwrap();
    let from_file = dmax(&["--config", cfg.to_str().unwrap(), "count"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert!(stdout(&from_file).contains(",81,"));
    let overridden = dmax(&["--config", cfg.to_str().unwrap(), "count", "--t", "2"]);
    assert!(stdout(&overridden).contains(",13,"));
}

#[test]
fn output_file_with_settings_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("avg.csv");
    let o = dmax(&[
        "average", "--body", "cube", "--dim", "1", "--t", "1", "--atoms", "0:3", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("average"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "x0,value\n-1,1.0\n0,1.0\n1,1.0\n");
    let side = std::fs::read_to_string(dir.path().join("avg.csv.config.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&side).unwrap();
    assert_eq!(v["command"]["subcommand"], "average");
}

#[test]
fn usage_errors_name_the_field() {
    let o = dmax(&["count", "--t", "1", "--dim", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dim"));
    let o = dmax(&["maximal", "--dim", "2", "--atoms", "1:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("atoms"));
    assert_eq!(dmax(&["nonsense"]).status.code(), Some(2));
    assert_eq!(dmax(&["--help"]).status.code(), Some(0));
}

#[test]
fn every_subcommand_runs() {
    let runs: [&[&str]; 8] = [
        &["volume", "--q", "2", "--dim", "3", "--radius", "1"],
        &["maximal", "--body", "cube", "--dim", "1", "--atoms", "0:1;4:1", "--t-max", "5"],
        &["semigroup", "--dim", "1", "--t", "1"],
        &["squarefn", "--dim", "1", "--generator", "random", "--side", "5"],
        &["transfer", "--check", "step-extension", "--dim", "1", "--atoms", "0:1;2:0.5"],
        &["multiplier", "--body", "cube", "--dim", "1", "--N", "1", "--xi", "0.5"],
        &["multiplier", "--q", "2", "--dim", "2", "--N", "1.5", "--xi", "0.1,-0.2", "--continuous"],
        &["verify", "--suite", "series", "--q", "2.5"],
    ];
    for args in runs {
        let o = dmax(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = dmax(&["multiplier", "--body", "cube", "--dim", "1", "--N", "1", "--xi", "0.5"]);
    let v: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((v + 1.0 / 3.0).abs() < 1e-15);
}
