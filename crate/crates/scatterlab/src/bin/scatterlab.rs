//! Command-line entry point: `scatterlab <kind> --config <path>
//! [--threads N] [--out DIR]`.
//!
//! Exit codes: 0 success, 2 config error, 3 solver error, 4 contract
//! violation.

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "scatterlab",
    version,
    about = "2D transmission scattering laboratory: forward solves, corner calculus and sweep experiments"
)]
struct Cli {
    /// Experiment kind (must match the config): solve | farfield | eta |
    /// profile | identity | stability | corner-bound | smallness |
    /// herglotz-blowup | disk-eig
    kind: String,

    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,

    /// Worker pool size (default 1 for determinism).
    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Output directory for CSV/JSON artifacts and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("scatterlab: failed to configure worker pool: {e}");
        return ExitCode::from(3);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scatterlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> scatterlab::Result<()> {
    let cfg = scatterlab::config::parse_config(&cli.config)?;
    if cfg.kind != cli.kind {
        return Err(scatterlab::Error::Config(vec![format!(
            "config kind '{}' does not match the requested kind '{}'",
            cfg.kind, cli.kind
        )]));
    }
    let out = scatterlab::runner::run(&cfg, &cli.out)?;
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
