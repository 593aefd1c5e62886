use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use chainbound::error::Error;
use chainbound::harness::{
    cmd_complexity_sweep, cmd_lemma, cmd_make_instance, cmd_run, cmd_verify, write_json,
    ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "chainbound",
    about = "Hard chain instances for first-order stationary-point search: \
             planners, reference optimizers, lemma verifiers and complexity sweeps"
)]
struct Cli {
    /// JSON experiment config; flags below override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for plan.json / trace.csv / report.json / sweep.csv
    /// (overrides the config's out_dir; defaults to ./out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized searches
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Instance family: convex-value, convex-distance, nonconvex-p2,
    /// nonconvex-general, distance-bounded
    #[arg(long, global = true)]
    family: Option<String>,

    /// Comma-separated strictly decreasing epsilon grid
    #[arg(long = "eps-grid", global = true, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan the configured family and write plan.json
    MakeInstance,
    /// Run the verification suites and write report.json
    Verify,
    /// Sweep the epsilon grid, writing sweep.csv and slope fits
    Sweep,
    /// Single optimizer run, writing trace.csv and run.json
    Run,
    /// Invoke one lemma oracle: zero-chain, convex-floor, nonconvex-floor,
    /// disc-tight, suboptimality
    Lemma {
        #[arg(long)]
        name: String,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if let Some(family) = &cli.family {
        config.family = Some(family.parse()?);
    }
    if let Some(grid) = &cli.eps_grid {
        config.epsilon_grid = Some(grid.clone());
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool> {
    let config = load_config(cli)?;
    let out_dir: PathBuf = cli
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::MakeInstance => {
            let doc = cmd_make_instance(&config)?;
            let path = write_json(&out_dir, "plan.json", &doc)?;
            println!(
                "planned {} (T = {}, predicted T = {}) -> {}",
                doc.plan.family.as_str(),
                doc.plan.t,
                doc.plan.predicted_t,
                path.display()
            );
            Ok(true)
        }
        Command::Verify => {
            let reports = cmd_verify(&config)?;
            let path = write_json(&out_dir, "report.json", &reports)?;
            let mut all_passed = true;
            println!("{:<58} {:>14} {:>14}  status", "claim", "measured", "bound");
            for r in &reports {
                all_passed &= r.passed;
                println!(
                    "{:<58} {:>14.6e} {:>14.6e}  {}",
                    r.claim,
                    r.measured,
                    r.bound,
                    if r.passed { "pass" } else { "FAIL" }
                );
            }
            println!("report -> {}", path.display());
            Ok(all_passed)
        }
        Command::Sweep => {
            let out = cmd_complexity_sweep(&config)?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("create {}", out_dir.display()))?;
            let csv_path = out_dir.join("sweep.csv");
            let mut file = fs::File::create(&csv_path)
                .with_context(|| format!("create {}", csv_path.display()))?;
            out.write_csv(&mut file)?;
            write_json(
                &out_dir,
                "sweep_fits.json",
                &(&out.predicted_fit, &out.measured_fit),
            )?;
            for row in &out.rows {
                println!(
                    "eps = {:<12} predicted = {:<14} measured = {:<10} {}",
                    row.epsilon,
                    row.t_predicted,
                    row.t_measured
                        .map(|t| t.to_string())
                        .unwrap_or_else(|| "-".into()),
                    row.status
                );
            }
            if let Some(fit) = &out.predicted_fit {
                println!(
                    "predicted slope = {:.4} (r^2 = {:.6})",
                    fit.slope, fit.r_squared
                );
            }
            if let Some(fit) = &out.measured_fit {
                println!(
                    "measured slope  = {:.4} (r^2 = {:.6})",
                    fit.slope, fit.r_squared
                );
            }
            println!("sweep -> {}", csv_path.display());
            Ok(true)
        }
        Command::Run => {
            let (trace, summary) = cmd_run(&config)?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("create {}", out_dir.display()))?;
            let csv_path = out_dir.join("trace.csv");
            let mut file = fs::File::create(&csv_path)
                .with_context(|| format!("create {}", csv_path.display()))?;
            trace.write_csv(&mut file)?;
            write_json(&out_dir, "run.json", &summary)?;
            match summary.t_eps {
                Some(t) => println!("stationary at query {t} of {}", summary.queries),
                None => println!(
                    "budget exhausted after {} queries; best gradient norm {:?}",
                    summary.queries, summary.best_grad_norm
                ),
            }
            println!("trace -> {}", csv_path.display());
            Ok(summary.t_eps.is_some())
        }
        Command::Lemma { name } => {
            let reports = cmd_lemma(&config, name)?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let invalid_config = err
                .downcast_ref::<Error>()
                .is_some_and(|e| matches!(e, Error::InvalidParam(_)));
            if invalid_config {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
