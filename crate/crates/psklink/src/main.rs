//! Command line front end for the experiment runners.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use psklink::experiment::{
    rows_to_csv, run_maxmin, run_min_power, run_rate_sweep, run_validate, write_csv,
    ExperimentConfig, ResultRow,
};
use psklink::{Error, Scheme};

#[derive(Parser)]
#[command(
    name = "psklink",
    version,
    about = "Multiuser MIMO downlink rates, bounds, and power allocation with PSK inputs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; falls back to the config's `output` field, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Restrict the run to one scheme: none, zf, or ci.
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo rates and analytical bounds over the configured SNR grid.
    RateSweep {
        #[command(flatten)]
        common: Common,
    },
    /// Minimum power to hold a target rate, swept over user distance.
    MinPower {
        #[command(flatten)]
        common: Common,
        /// Per-user target rate in bits per channel use.
        #[arg(long, default_value_t = 0.5)]
        target_rate: f64,
        /// Comma-separated distance grid; defaults to 10,20,...,100.
        #[arg(long, value_delimiter = ',')]
        distances: Option<Vec<f64>>,
    },
    /// Max-min fairness power allocation over a budget grid.
    Maxmin {
        #[command(flatten)]
        common: Common,
        /// Comma-separated total-power budgets; defaults to a log grid
        /// from 1e4 to 1e7.
        #[arg(long, value_delimiter = ',')]
        power_grid: Option<Vec<f64>>,
    },
    /// Numerical self-checks; exits with code 3 when any check fails.
    Validate {
        /// Seed for the sampled checks.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("psklink: error: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("PSKLINK_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("psklink: ignoring invalid PSKLINK_THREADS value '{v}'"),
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(scheme) = &common.scheme {
        cfg.schemes = vec![scheme.parse::<Scheme>()?];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(common: &Common, cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<(), Error> {
    let path = common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from));
    match path {
        Some(path) => {
            write_csv(&path, rows)?;
            eprintln!("psklink: wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{}", rows_to_csv(rows)),
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::RateSweep { common } => {
            let cfg = load_config(&common)?;
            eprintln!(
                "psklink: rate sweep over {} SNR points, {} scheme(s), {} trials",
                cfg.snr_db.len(),
                cfg.schemes.len(),
                cfg.trials
            );
            let rows = run_rate_sweep(&cfg)?;
            emit(&common, &cfg, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::MinPower { common, target_rate, distances } => {
            let cfg = load_config(&common)?;
            let grid = distances
                .unwrap_or_else(|| (1..=10).map(|i| 10.0 * i as f64).collect());
            eprintln!(
                "psklink: minimum power for rate {target_rate} over {} distance(s)",
                grid.len()
            );
            let rows = run_min_power(&cfg, target_rate, &grid)?;
            emit(&common, &cfg, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Maxmin { common, power_grid } => {
            let cfg = load_config(&common)?;
            let grid = power_grid
                .unwrap_or_else(|| vec![1e4, 3e4, 1e5, 3e5, 1e6, 3e6, 1e7]);
            eprintln!("psklink: max-min allocation over {} budget(s)", grid.len());
            let rows = run_maxmin(&cfg, &grid)?;
            emit(&common, &cfg, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { seed } => {
            let checks = run_validate(seed)?;
            let mut failed = 0;
            for c in &checks {
                let status = if c.pass { "ok  " } else { "FAIL" };
                println!(
                    "{status} {:<22} measured {:>12.5e}  tolerance {:>9.1e}  {}",
                    c.name, c.measured, c.tolerance, c.detail
                );
                if !c.pass {
                    failed += 1;
                }
            }
            if failed > 0 {
                eprintln!("psklink: {failed} of {} checks failed", checks.len());
                Ok(ExitCode::from(3))
            } else {
                eprintln!("psklink: all {} checks passed", checks.len());
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}
