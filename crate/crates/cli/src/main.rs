use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use toeplitz_cli::{run, Cli};

/// Base directory for relative `--out` paths.
const OUT_DIR_VAR: &str = "TOEPLITZ_OUT_DIR";

fn resolve(out: PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if out.is_relative() => PathBuf::from(dir).join(out),
        _ => out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match outcome.out {
        Some(path) => {
            let path = resolve(path);
            path.parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map_or(Ok(()), std::fs::create_dir_all)
                .and_then(|_| std::fs::write(&path, &outcome.bytes))
                .with_context(|| format!("cannot write {}", path.display()))
        }
        None => std::io::stdout().write_all(&outcome.bytes).context("cannot write to stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
