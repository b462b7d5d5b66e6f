//! Batch CLI around the mixsing library: solve, compare, bounds,
//! selftest, sweep. Exit codes: 0 pass, 1 check failure, 2 invalid
//! input, 3 solver nonconvergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mixsing::report::{exit_code_for, run_sweep, Checks, ExperimentConfig};
use mixsing::{run_experiment, selftest, summability_bounds};

#[derive(Parser)]
#[command(name = "mixsing", version, about = "Mixed local-nonlocal singular elliptic solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for a JSON experiment config.
    Solve {
        config: PathBuf,
        /// Output directory (default: config's `output` field or ./out).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve and run only the rearrangement-comparison phase.
    Compare {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the explicit summability bound constants.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        volume: f64,
        #[arg(long)]
        fnorm: f64,
    },
    /// Run the built-in invariant battery at small sizes.
    Selftest,
    /// Re-run the experiment over a list of values of one parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. --values 0.25,0.5,0.75
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, mixsing::Error> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text)
}

fn out_dir(cfg: &ExperimentConfig, cli: Option<PathBuf>) -> PathBuf {
    cli.or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run() -> Result<bool, mixsing::Error> {
    if let Ok(threads) = std::env::var("MIXSING_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { config, output } => {
            let cfg = load_config(&config)?;
            let dir = out_dir(&cfg, output);
            let (_, report) = run_experiment(&cfg, &dir)?;
            println!(
                "solve: sup u = {:.6e}, min u = {:.6e}, overall {}",
                report.solution_sup,
                report.solution_min,
                if report.overall_pass { "pass" } else { "FAIL" }
            );
            if let Some(t) = &report.talenti {
                println!("  talenti min_margin = {:.6e} (tol {:.3e})", t.min_margin, t.tolerance);
            }
            println!("  outputs in {}", dir.display());
            Ok(report.overall_pass)
        }
        Command::Compare { config, output } => {
            let mut cfg = load_config(&config)?;
            cfg.checks = Checks {
                talenti: true,
                bounds: false,
                uniqueness: false,
                equiintegrability: false,
                energy: true,
            };
            let dir = out_dir(&cfg, output);
            let (_, report) = run_experiment(&cfg, &dir)?;
            let t = report.talenti.as_ref().expect("comparison phase ran");
            println!(
                "compare: min_margin = {:.6e}, integrated = {:.6e}, tol = {:.3e}: {}",
                t.min_margin,
                t.integrated_margin,
                t.tolerance,
                if t.pass { "pass" } else { "FAIL" }
            );
            Ok(report.overall_pass)
        }
        Command::Bounds { n, m, gamma, volume, fnorm } => {
            let rep = summability_bounds(n, m, gamma, volume, fnorm)?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(true)
        }
        Command::Selftest => {
            let summary = selftest(false);
            println!("selftest: {} passed, {} failed", summary.passed, summary.failed.len());
            for f in &summary.failed {
                println!("  FAIL {f}");
            }
            Ok(summary.ok())
        }
        Command::Sweep { config, param, values, output } => {
            let cfg = load_config(&config)?;
            let dir = out_dir(&cfg, output);
            let rows = run_sweep(&cfg, &param, &values, &dir)?;
            println!("{param:>10} {:>14} {:>14} pass", "sup u", "min_margin");
            let mut all = true;
            for r in &rows {
                println!(
                    "{:>10} {:>14.6e} {:>14} {}",
                    r.value,
                    r.solution_sup,
                    r.min_margin.map(|m| format!("{m:.6e}")).unwrap_or_else(|| "-".into()),
                    r.overall_pass
                );
                all &= r.overall_pass;
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
