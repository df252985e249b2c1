use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use mlmc_bench::{
    emit_csv, emit_json, emit_timing, exit, parse_eps_list, parse_name, run_experiment, BenchError,
    ExperimentConfig, ExperimentReport, Overrides,
};

/// Multilevel vs standard Monte Carlo cost sweep.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// TOML experiment file; built-in defaults otherwise
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated tolerances, largest first
    #[arg(long, value_name = "LIST")]
    eps: Option<String>,
    /// call, put or digital-call
    #[arg(long)]
    payoff: Option<String>,
    /// euler-maruyama or milstein
    #[arg(long)]
    scheme: Option<String>,
    /// adaptive or fixed-l
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions per tolerance
    #[arg(long)]
    reps: Option<u32>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(Overrides {
        epsilon_list: cli.eps.as_deref().map(parse_eps_list).transpose()?,
        payoff: cli.payoff.as_deref().map(|s| parse_name("payoff", s)).transpose()?,
        scheme: cli.scheme.as_deref().map(|s| parse_name("scheme", s)).transpose()?,
        mode: cli.mode.as_deref().map(|s| parse_name("mode", s)).transpose()?,
        seed: cli.seed,
        repetitions: cli.reps,
        output_dir: cli.out.clone(),
    });
    if cli.threads == Some(0) {
        return Err(BenchError::Config("threads must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    let report = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?
            .install(|| run_experiment(cfg))?,
        None => run_experiment(cfg)?,
    };
    emit_csv(&report, &cfg.output_dir)?;
    emit_json(&report, &cfg.output_dir)?;
    emit_timing(&report, &cfg.output_dir)?;
    Ok(report)
}

fn summarize(report: &ExperimentReport) {
    println!("{:>8} {:>12} {:>14} {:>14} {:>14} {:>14}", "epsilon", "levels", "mlmc value", "mlmc cost*e2", "std value", "std cost*e2");
    for rec in &report.records {
        let run = &rec.runs[0];
        let value = |m: &mlmc_bench::MethodRecord| {
            m.estimate.as_ref().map_or("failed".to_owned(), |e| format!("{:.5}", e.value))
        };
        let scaled = |v: Option<f64>| v.map_or("-".to_owned(), |v| format!("{v:.4e}"));
        println!(
            "{:>8} {:>12} {:>14} {:>14} {:>14} {:>14}",
            rec.epsilon,
            rec.n_l.len(),
            value(&run.mlmc),
            scaled(rec.mlmc_cost_times_eps2),
            value(&run.std_mc),
            scaled(rec.std_mc_cost_times_eps2),
        );
    }
    if report.has_flags() {
        println!("{} run(s) flagged; see report.json", report.flagged_runs);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::from(exit::OK as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    match run(&cli, &cfg) {
        Ok(report) => {
            summarize(&report);
            let code = if report.has_flags() { exit::FLAGGED } else { exit::OK };
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}
