//! Thin command-line front end: `run` executes one configured experiment
//! and writes its artifacts, `verify` runs a named built-in check suite.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad flags, malformed
//! or rejected configuration, unknown suite), 3 on numerical failures
//! (including a verification suite reporting FAIL), 1 on IO errors while
//! writing artifacts.

use std::env;
use std::process::ExitCode;

use kinetic_relax::config;
use kinetic_relax::runner;
use kinetic_relax::verify::{self, Suite};
use kinetic_relax::Error;

const USAGE: &str = "\
kinetic-relax: relaxation-to-equilibrium experiments on kinetic models

USAGE:
    kinetic-relax run <config.json> [--prefix P] [--seed S]
    kinetic-relax verify <suite>

COMMANDS:
    run      execute the experiment described by a JSON config file and
             write <prefix>_trace.csv and <prefix>_summary.json
    verify   run one built-in check suite: parseval | lemmas | gt-identity
             | transport-obs | boltzmann-structure | all

FLAGS (run):
    --prefix P   override the output path prefix from the config
    --seed S     override the random seed from the config

The KINETIC_RELAX_THREADS environment variable caps worker threads.
Exit codes: 0 success, 2 validation error, 3 numerical failure.
";

fn main() -> ExitCode {
    init_thread_pool();
    let args: Vec<String> = env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Maps error kinds onto the documented exit codes.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Validation { .. } | Error::InvalidInput(_) | Error::Json(_) => 2,
        Error::Numerical(_) | Error::Recurrence { .. } => 3,
        Error::Io(_) => 1,
    }
}

/// Applies the `KINETIC_RELAX_THREADS` cap before any parallel region runs.
fn init_thread_pool() {
    if let Ok(raw) = env::var("KINETIC_RELAX_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                // Fails only if a pool already exists, which cannot happen
                // this early; ignoring keeps the call idempotent.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid KINETIC_RELAX_THREADS={raw:?}"),
        }
    }
}

fn dispatch(args: &[String]) -> kinetic_relax::Result<ExitCode> {
    match args.first().map(String::as_str) {
        Some("run") => run_command(&args[1..]),
        Some("verify") => verify_command(&args[1..]),
        Some("help" | "--help" | "-h") => {
            print!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        Some(other) => {
            eprintln!("error: unknown command `{other}`\n\n{USAGE}");
            Ok(ExitCode::from(2))
        }
        None => {
            eprint!("{USAGE}");
            Ok(ExitCode::from(2))
        }
    }
}

fn run_command(args: &[String]) -> kinetic_relax::Result<ExitCode> {
    let mut path: Option<&str> = None;
    let mut prefix: Option<String> = None;
    let mut seed: Option<u64> = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--prefix" => {
                let value = it
                    .next()
                    .ok_or_else(|| Error::InvalidInput("--prefix needs a value".into()))?;
                prefix = Some(value.clone());
            }
            "--seed" => {
                let raw = it
                    .next()
                    .ok_or_else(|| Error::InvalidInput("--seed needs a value".into()))?;
                seed = Some(raw.parse::<u64>().map_err(|_| {
                    Error::validation("seed", "must be an unsigned 64-bit integer")
                })?);
            }
            other if other.starts_with('-') => {
                return Err(Error::InvalidInput(format!("unknown flag `{other}`")));
            }
            other => {
                if path.is_some() {
                    return Err(Error::InvalidInput(
                        "run expects exactly one config path".into(),
                    ));
                }
                path = Some(other);
            }
        }
    }
    let path = path.ok_or_else(|| Error::InvalidInput("run needs a config path".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation("config", format!("cannot read `{path}`: {e}")))?;
    let mut cfg = config::parse(&text)?.resolve()?;
    if let Some(p) = prefix {
        cfg.prefix = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let artifacts = runner::run_experiment(&cfg)?;
    runner::write_artifacts(&cfg, &artifacts)?;
    println!("wrote {} and {}", cfg.trace_path(), cfg.summary_path());
    Ok(ExitCode::SUCCESS)
}

fn verify_command(args: &[String]) -> kinetic_relax::Result<ExitCode> {
    let [name] = args else {
        return Err(Error::InvalidInput(format!(
            "verify needs exactly one suite: {}",
            Suite::NAMES.join(" | ")
        )));
    };
    let suite = Suite::parse(name).ok_or_else(|| {
        Error::InvalidInput(format!(
            "unknown suite `{name}`; expected one of: {}",
            Suite::NAMES.join(" | ")
        ))
    })?;
    let mut out = std::io::stdout().lock();
    let ok = verify::run_suite(suite, &mut out)?;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_documented_exit_codes() {
        assert_eq!(exit_code_for(&Error::validation("x", "bad")), 2);
        assert_eq!(exit_code_for(&Error::InvalidInput(String::from("bad"))), 2);
        assert_eq!(exit_code_for(&Error::Numerical(String::from("nan"))), 3);
        assert_eq!(
            exit_code_for(&Error::Recurrence {
                index: 1,
                detail: String::from("violated"),
            }),
            3
        );
        let io = Error::Io(std::io::Error::new(std::io::ErrorKind::Other, "disk"));
        assert_eq!(exit_code_for(&io), 1);
    }
}
