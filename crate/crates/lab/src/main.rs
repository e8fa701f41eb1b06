use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rcc_lab::fig1::run_fig1;
use rcc_lab::verify::{run_suite, Suite, VerifyOptions, FACTORIZATION_TOL};
use rcc_lab::{compute, ExperimentConfig, LabError};

#[derive(Parser, Debug)]
#[command(name = "rcc-lab", version, about = "Remote coherence creation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase-damping sweep over random two-qubit states, written as CSV.
    Fig1 {
        /// JSON config; flags given on the command line take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG scatter plot here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run a seeded property sweep; exits 1 on any violation.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Operations per state (theorem1 forward and theorem4 only).
        #[arg(long)]
        per_state: Option<usize>,
    },
    /// Evaluate one pure state under one channel and print the report as JSON.
    Compute {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: PathBuf,
    },
}

enum Outcome {
    Ok,
    Violation,
}

fn fig1(
    config: Option<PathBuf>,
    samples: Option<usize>,
    rates: Option<Vec<f64>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
) -> Result<Outcome, LabError> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::load(&path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if let Some(r) = rates {
        cfg.damping_rates = r;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output_path = o;
    }
    if let Some(p) = plot {
        cfg.emit_plot = true;
        cfg.plot_path = Some(p);
    }
    let summary = run_fig1(&cfg)?;
    println!(
        "fig1: {} rows, max |ratio - E| = {:e}, {} rows without ratio, mean average RCC strictly increasing in r: {}",
        summary.rows, summary.max_ratio_deviation, summary.rows_without_ratio, summary.strictly_increasing
    );
    for m in &summary.means {
        println!("  r = {}: mean average RCC = {:.6}", m.r, m.mean_avg_rcc);
    }
    for (lo, hi) in &summary.monotonicity_flags {
        println!("  warning: mean drops from r = {lo} to r = {hi} beyond sampling noise");
    }
    Ok(if summary.max_ratio_deviation < FACTORIZATION_TOL {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn run(cli: Cli) -> Result<Outcome, LabError> {
    match cli.command {
        Command::Fig1 {
            config,
            samples,
            rates,
            seed,
            out,
            plot,
        } => fig1(config, samples, rates, seed, out, plot),
        Command::Verify {
            suite,
            samples,
            seed,
            per_state,
        } => {
            let report = run_suite(
                suite,
                &VerifyOptions {
                    samples,
                    seed,
                    per_state,
                },
            )?;
            for c in &report.checks {
                eprintln!("{c}");
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if report.passed { Outcome::Ok } else { Outcome::Violation })
        }
        Command::Compute { state, channel } => {
            let report = compute::compute_files(&state, &channel)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
