// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use topocost::cli::{execute, Cli, ExitStatus, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads = match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {raw:?}");
                return ExitCode::from(ExitStatus::InvalidArguments.code() as u8);
            }
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("global thread pool is configured once");
    }

    let run = execute(&cli);
    if let Some(msg) = &run.message {
        eprintln!("error: {msg}");
    }
    match (&cli.out, run.status) {
        (Some(path), ExitStatus::Success) => {
            if let Err(e) = std::fs::write(path, &run.document) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(ExitStatus::InvalidArguments.code() as u8);
            }
        }
        (Some(_), _) => {}
        (None, _) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(run.document.as_bytes());
            let _ = out.flush();
        }
    }
    ExitCode::from(run.status.code() as u8)
}
