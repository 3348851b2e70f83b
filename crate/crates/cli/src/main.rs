//! `brownq` command-line front end.

mod commands;
mod config;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "brownq",
    about = "Boundary and support analysis for operators p + iq with atomic parts",
    version
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, default_value = "brownq.json")]
    config: String,

    /// Output directory for all artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap (BROWNQ_THREADS applies when absent).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact boundary-curve polynomial via the resultant pipeline.
    Curve,
    /// Trace the boundary set in the g-plane and emit witnesses.
    Omega,
    /// Sample a finite-n eigenvalue cloud.
    Esd,
    /// Monte-Carlo Green's function ladder and point classification.
    Greens,
    /// Cross-validate curve, witnesses, and spectrum; render the overlay.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("BROWNQ_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
        {
            eprintln!("warning: thread pool setup failed: {e}");
        }
    }

    let cfg = match config::load(&cli.config, cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Curve => commands::cmd_curve(&cfg, &cli.out),
        Command::Omega => commands::cmd_omega(&cfg, &cli.out),
        Command::Esd => commands::cmd_esd(&cfg, &cli.out),
        Command::Greens => commands::cmd_greens(&cfg, &cli.out),
        Command::Verify => commands::cmd_verify(&cfg, &cli.out),
    };

    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
