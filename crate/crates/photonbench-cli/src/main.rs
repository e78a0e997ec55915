//! Command-line front end: validate a config, run one experiment from it,
//! or list the registry. One experiment per invocation; sweeps are
//! parameters of an experiment, never shell loops, so a single config file
//! reproduces a whole result.
//!
//! Exit codes: 0 success, 1 runtime error, 2 validation failure,
//! 3 partial (the run finished but flagged unconverged points).

mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgAction, Parser, Subcommand};

use experiments::{registry, run_experiment, validate_document, Overrides, RunDocument};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

/// Environment variable overriding the default output root (`runs`); the
/// `--out` flag wins over both.
pub const OUT_ENV: &str = "PHOTONBENCH_OUT";

#[derive(Parser)]
#[command(
    name = "photonbench",
    version,
    about = "Configuration-driven runs of the photonic workbench experiments"
)]
struct Cli {
    /// Print progress detail to stderr (repeat for more).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config against its experiment's schema without computing.
    Validate {
        /// JSON config: {"experiment": <name>, "params": {…}}.
        #[arg(long)]
        config: PathBuf,
    },
    /// Validate, run the experiment, and write CSV/JSON artifacts plus a
    /// manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output root; artifacts land in <out>/<experiment>/.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker-pool size for sweep points (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the RNG seed of a stochastic experiment.
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply the grid resolution of field experiments (>1 refines).
        #[arg(long)]
        resolution_scale: Option<f64>,
    },
    /// List registered experiments in stable order.
    List {
        /// Machine-readable JSON instead of aligned text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { config } => {
            let doc = RunDocument::load(&config)?;
            match validate_document(&doc) {
                Ok(()) => {
                    println!("ok: {} config is valid", doc.experiment);
                    Ok(ExitCode::SUCCESS)
                }
                Err(violations) => {
                    for v in &violations {
                        eprintln!("violation: {v}");
                    }
                    Ok(ExitCode::from(EXIT_VALIDATION))
                }
            }
        }
        Command::Run {
            config,
            out,
            threads,
            seed,
            resolution_scale,
        } => {
            let doc = RunDocument::load(&config)?;
            if let Err(violations) = validate_document(&doc) {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .context("configuring the worker pool")?;
            }
            let overrides = Overrides {
                seed,
                resolution_scale,
                threads,
            };
            let out_root = out
                .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("runs"));
            let report = run_experiment(&doc, &overrides, &out_root, cli.verbose)?;
            println!(
                "wrote {} ({})",
                report.dir.display(),
                if report.flagged.is_empty() {
                    "converged".to_string()
                } else {
                    format!("partial: {} flagged", report.flagged.len())
                }
            );
            if report.flagged.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &report.flagged {
                    eprintln!("flagged: {f}");
                }
                Ok(ExitCode::from(EXIT_PARTIAL))
            }
        }
        Command::List { json } => {
            if json {
                let rows: Vec<_> = registry()
                    .iter()
                    .map(|(name, about)| serde_json::json!({"name": name, "about": about}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                for (name, about) in registry() {
                    println!("{name:<20} {about}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
