//! The `dmax` command line: one subcommand per capability, CSV or JSON
//! artifacts, and exit codes 0 (ok), 1 (an in-regime check failed) and
//! 2 (usage or input error).
//!
//! The artifact goes to `--output` when given, with the effective settings
//! in a `<output>.config.json` sidecar and the summary on standard output;
//! otherwise the artifact goes to standard output and the summary and
//! settings to standard error. JSON output is one record per line.

mod args;
mod commands;
mod config;
mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
use args::{Command, Format};
use commands::Artifact;

use crate::error::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn execute(cli: &Cli) -> Result<Artifact> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Count(a) => commands::count(a),
        Command::Volume(a) => commands::volume(a),
        Command::Average(a) => commands::average_cmd(a, seed),
        Command::Maximal(a) => commands::maximal_cmd(a, seed),
        Command::Semigroup(a) => commands::semigroup_cmd(a, seed),
        Command::Squarefn(a) => commands::squarefn_cmd(a, seed),
        Command::Constant(a) => commands::constant(a, seed),
        Command::Transfer(a) => commands::transfer(a, seed),
        Command::Multiplier(a) => commands::multiplier_cmd(a, seed),
        Command::Verify(a) => commands::verify(a, seed),
        Command::Sweep(a) => sweep::sweep(a, seed),
    }
}

fn render(art: &Artifact, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => art.csv(),
        Format::Json => {
            let mut out = Vec::new();
            match &art.json {
                serde_json::Value::Array(items) => {
                    for it in items {
                        serde_json::to_writer(&mut out, it)?;
                        out.push(b'\n');
                    }
                }
                v => {
                    serde_json::to_writer(&mut out, v)?;
                    out.push(b'\n');
                }
            }
            Ok(out)
        }
    }
}

fn emit(cli: &Cli, art: &Artifact) -> Result<()> {
    let body = render(art, cli.global.format)?;
    let settings = serde_json::to_string(cli)?;
    match &cli.global.output {
        Some(path) => {
            std::fs::write(path, &body)?;
            let mut side = path.clone().into_os_string();
            side.push(".config.json");
            std::fs::write(side, format!("{settings}\n"))?;
            println!("{}", art.summary);
        }
        None => {
            std::io::stdout().write_all(&body)?;
            eprintln!("{}", art.summary);
            eprintln!("config: {settings}");
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand(args, &Command::NAMES) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: config: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: threads: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = pool.install(|| execute(&cli).and_then(|art| emit(&cli, &art).map(|_| art.failed)));
    match outcome {
        Ok(false) => EXIT_OK,
        Ok(true) => EXIT_FAILED_CHECK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
        let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
        assert_eq!(names, Command::NAMES);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["dmax", "count"]), EXIT_USAGE);
        assert_eq!(run(["dmax", "count", "--t", "1", "--body", "sphere"]), EXIT_USAGE);
        assert_eq!(run(["dmax", "count", "--t", "1", "--dim", "0"]), EXIT_USAGE);
    }
}
