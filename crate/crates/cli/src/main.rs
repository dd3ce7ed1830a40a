mod config;
mod run;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, RunConfig, SEED_ENV};
use run::{Outcome, EXIT_ERROR};

fn sidecar_path(out: &Path, suffix: &str) -> std::path::PathBuf {
    out.with_extension(suffix)
}

fn emit(cfg: &RunConfig, outcome: &Outcome) -> Result<(), String> {
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    let Some(out) = &cfg.out else {
        print!("{text}");
        return Ok(());
    };
    std::fs::write(out, text).map_err(|e| format!("{}: {e}", out.display()))?;
    if cfg.emit_csv {
        for (suffix, body) in &outcome.sidecars {
            let p = sidecar_path(out, suffix);
            std::fs::write(&p, body).map_err(|e| format!("{}: {e}", p.display()))?;
        }
    }
    Ok(())
}

fn execute(cfg: &RunConfig, threads: Option<usize>) -> Result<Outcome, String> {
    match threads {
        None => run::run(cfg),
        Some(0) => Err("--threads must be positive".into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| run::run(cfg)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR as u8),
            };
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let started = Instant::now();
    let result = RunConfig::from_cli(cli, env_seed.as_deref()).and_then(|(cfg, threads)| {
        let outcome = execute(&cfg, threads)?;
        emit(&cfg, &outcome)?;
        Ok(outcome.exit)
    });
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
