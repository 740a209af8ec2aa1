use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tier_harness::config::ExperimentConfig;
use tier_harness::output::{write_bytes, write_csv};
use tier_harness::verify::run_verify;
use tier_harness::{run_ctim, run_intersections, run_jtim, run_per_seed, HarnessError};

#[derive(Parser)]
#[command(name = "tier", version, about = "Intertwined influence maximization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for candidate scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Conditional sweep: `ctim.csv`, `ctim_trace.csv`.
    Ctim,
    /// Joint sweep: `jtim.csv`, `jtim_trace.csv`.
    Jtim,
    /// Seed-set overlaps: `intersections.csv`.
    Intersect,
    /// Per-seed marginals of the target in the full game: `per_seed.csv`.
    PerSeed,
    /// Oracle checks: `verify.csv`, exit code 2 on any failure.
    Verify {
        /// Random instances for the engine/oracle comparison.
        #[arg(long, default_value_t = 200)]
        instances: u64,
    },
}

enum Failure {
    Config(HarnessError),
    Verification,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Config(e)
    }
}

fn out_dir(cli: &Cli, cfg: Option<&ExperimentConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| HarnessError::Config("--config is required".into()))?;
    ExperimentConfig::load(path)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    if let Command::Verify { instances } = cli.command {
        let rows = run_verify(instances)?;
        for r in &rows {
            println!("{:<4}  {:<40}  {}", r.status, r.check, r.detail);
        }
        write_csv(&out_dir(cli, None).join("verify.csv"), &rows)?;
        return if rows.iter().all(|r| r.status == "pass") {
            Ok(())
        } else {
            Err(Failure::Verification)
        };
    }

    let cfg = load(cli)?;
    let dir = out_dir(cli, Some(&cfg));
    match cli.command {
        Command::Ctim => {
            let report = run_ctim(&cfg)?;
            write_csv(&dir.join("ctim.csv"), &report.rows)?;
            let mut trace = Vec::new();
            report
                .c_tier
                .write_trace_csv(&cfg.catalog.target, &mut trace)
                .map_err(HarnessError::from)?;
            write_bytes(&dir.join("ctim_trace.csv"), &trace)?;
        }
        Command::Jtim => {
            let report = run_jtim(&cfg)?;
            write_csv(&dir.join("jtim.csv"), &report.rows)?;
            let mut trace = Vec::new();
            report
                .game
                .write_trace_csv(&report.catalog, &mut trace)
                .map_err(HarnessError::from)?;
            write_bytes(&dir.join("jtim_trace.csv"), &trace)?;
        }
        Command::Intersect => write_csv(&dir.join("intersections.csv"), &run_intersections(&cfg)?)?,
        Command::PerSeed => write_csv(&dir.join("per_seed.csv"), &run_per_seed(&cfg)?.rows)?,
        Command::Verify { .. } => unreachable!(),
    }
    println!("wrote {}", Path::new(&dir).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
