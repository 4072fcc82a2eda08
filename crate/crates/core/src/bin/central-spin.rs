use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use central_spin::scenario::{self, figures, ScenarioConfig, WORKERS_ENV};

/// Central-spin reduced dynamics: scenarios, figure data and oracle checks.
#[derive(Parser)]
#[command(name = "central-spin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write its CSV.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fidelity surface over Γt and γ₀/Γ (Lorentzian bath).
    Fig1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Fidelity curves for the Gaussian bath at N = 10⁴, 10⁵, 10⁶.
    Fig2 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Free vs pulse-controlled fidelity.
    Fig3 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the finite-bath oracle with the reduced solver.
    OracleCompare {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the [sweep] axis of a config.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> central_spin::Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("{WORKERS_ENV} must be a positive integer, got '{raw}'"))?;
    if n == 0 {
        return Err(format!("{WORKERS_ENV} must be a positive integer, got '{raw}'"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn execute(command: Command) -> central_spin::Result<()> {
    match command {
        Command::Run { config, seed } => {
            let path = scenario::run_scenario(&load(&config, seed)?)?;
            println!("wrote {}", path.display());
        }
        Command::Fig1 { out } => println!("wrote {}", figures::fig1(&out)?.display()),
        Command::Fig2 { out } => println!("wrote {}", figures::fig2(&out)?.display()),
        Command::Fig3 { out } => println!("wrote {}", figures::fig3(&out)?.display()),
        Command::OracleCompare { config, seed } => {
            let cmp = scenario::oracle_compare(&load(&config, seed)?)?;
            println!("max_abs = {:e}", cmp.report.max_abs);
            println!("rms = {:e}", cmp.report.rms);
            println!("wrote {}", cmp.oracle_csv.display());
            println!("wrote {}", cmp.reduced_csv.display());
            println!("wrote {}", cmp.report_path.display());
        }
        Command::Sweep { config, seed } => {
            let out = scenario::run_sweep(&load(&config, seed)?)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            println!("wrote {}", out.summary.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
