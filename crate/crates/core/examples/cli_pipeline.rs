//! Drives the `dmax` command line in-process: a config file, a CSV artifact
//! with its settings sidecar, and a JSON verification run.
//!
//!     cargo run --release --example cli_pipeline

use discrete_maximal::cli::run;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("dmax-example");
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("disc.cfg");
    std::fs::write(&cfg, "# disc in Z^2\nbody = qball\nq = 2\ndim = 2\n")?;
    let out = dir.join("counts.csv");
    let code = run([
        "dmax", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "count", "--t", "10",
    ]);
    println!("exit {code}\n{}", std::fs::read_to_string(&out)?);
    println!("sidecar {}", std::fs::read_to_string(dir.join("counts.csv.config.json"))?);
    let code = run(["dmax", "--format", "json", "verify", "--suite", "count-volume", "--q", "3", "--dim", "3", "--N", "9"]);
    println!("exit {code}");
    Ok(())
}
