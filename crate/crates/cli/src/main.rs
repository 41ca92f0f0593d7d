use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpiter::{builtin_suite, LipschitzClass};
use fpiter_cli::runner::norm_label;
use fpiter_cli::{run_experiments, ExperimentConfig, RunError};

/// Fixed-point iteration experiments.
#[derive(Debug, Parser)]
#[command(name = "fpiter", version)]
struct Cli {
    /// Override the config's output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Override the config's validation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment config and write traces, comparisons and summary.json.
    Run { config: PathBuf },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the built-in problems.
    ListProblems,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_OUTPUT: u8 = 2;

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, ExitCode> {
    let mut cfg = ExperimentConfig::from_path(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })?;
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::ListProblems => {
            println!(
                "{:<18} {:>3}  {:<16} {:<10} start",
                "name", "dim", "class", "norm"
            );
            for p in builtin_suite() {
                let class = match p.mapping.class() {
                    LipschitzClass::Contraction(l) => format!("contraction {l:.4}"),
                    LipschitzClass::Nonexpansive => "nonexpansive".into(),
                };
                println!(
                    "{:<18} {:>3}  {:<16} {:<10} {}",
                    p.name,
                    p.mapping.dim(),
                    class,
                    norm_label(p.recommended_norm),
                    p.default_start
                );
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&cli, config) {
            Ok(cfg) => {
                println!(
                    "ok: {} problems, {} schedules, {} schemes, {} runs, {} comparison pairs",
                    cfg.problems.len(),
                    cfg.schedules.len(),
                    cfg.schemes.len(),
                    cfg.run_count(),
                    cfg.comparisons.len()
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config } => {
            let cfg = match load(&cli, config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run_experiments(&cfg) {
                Ok(summary) => {
                    for c in &summary.comparisons {
                        println!(
                            "{:<18} {:<10} {:>8} vs {:<8} {}",
                            c.problem, c.schedule, c.a, c.b, c.classification
                        );
                    }
                    let failed: Vec<_> = summary.failed_checks().collect();
                    println!(
                        "{} runs, {} checks, {} failed; artifacts in {}",
                        summary.runs.len(),
                        summary.checks.len(),
                        failed.len(),
                        cfg.output_dir.display()
                    );
                    for f in failed {
                        println!("  FAIL {} {}", f.run, f.name);
                    }
                    ExitCode::SUCCESS
                }
                Err(e @ RunError::Output { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_OUTPUT)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
    }
}
