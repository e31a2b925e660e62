use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wegan::harness::compare::run_compare;
use wegan::harness::config::{parse_with_overrides, ExperimentConfig};
use wegan::harness::trace_csv::{write_trace_csv, RunLabels};
use wegan::harness::run_checks;
use wegan::metrics::faithfulness;
use wegan::train;

#[derive(Parser)]
#[command(name = "wegan", version, about = "Weighted-generator GAN training on the Gaussian ring benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a single run and write its metric trace.
    Train(RunArgs),
    /// Run every configured variant over every seed and write traces,
    /// aggregates, relative improvements and a manifest.
    Compare(RunArgs),
    /// Run the built-in property checks.
    Check,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` configuration file; defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// uniform, wegan or iwgan (comma separated for compare).
    #[arg(long)]
    algo: Option<String>,
    /// Comma-separated eta values for wegan.
    #[arg(long)]
    eta: Option<String>,
    /// Discriminator steps per generator step.
    #[arg(long)]
    k: Option<i64>,
    #[arg(long)]
    batch_size: Option<i64>,
    /// Generator iterations per run.
    #[arg(long)]
    iters: Option<u64>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?,
            None => String::new(),
        };
        let mut overrides = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                overrides.push((k.to_string(), v));
            }
        };
        push("seed", self.seed.map(|s| s.to_string()));
        push("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string()));
        push("algorithms", self.algo.clone());
        push("etas", self.eta.clone());
        push("disc_steps", self.k.map(|k| k.to_string()));
        push("batch_size", self.batch_size.map(|m| m.to_string()));
        push("iters", self.iters.map(|n| n.to_string()));
        Ok(parse_with_overrides(&text, &overrides)?)
    }
}

fn cmd_train(args: &RunArgs) -> Result<()> {
    let config = args.load()?;
    let run = config.primary_run();
    let variant = config.variants[0];
    let run_id = format!("{}-seed{}", variant.name(), run.seed);
    fs::create_dir_all(&config.out_dir).with_context(|| format!("cannot create {}", config.out_dir.display()))?;
    let (trace, failure) = match train(&run) {
        Ok(trace) => (trace, None),
        Err(f) => (f.trace.clone(), Some(f)),
    };
    for r in &trace.records {
        println!(
            "epoch {:>4}  iter {:>6}  mmd {:.6}  weight_var {:.3e}  D(real) {:.3}  D(fake) {:.3}",
            r.epoch, r.gen_iter, r.mmd, r.weight_var, r.mean_d_real, r.mean_d_fake
        );
    }
    let path = config.out_dir.join(format!("{run_id}.csv"));
    let labels = RunLabels {
        run_id: &run_id,
        seed: run.seed,
        algorithm: variant.scheme.algorithm(),
        eta: variant.scheme.eta(),
        loss_family: variant.loss.name(),
    };
    let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    write_trace_csv(file, &labels, &trace)?;
    println!("trace written to {}", path.display());
    if let Some(last) = trace.records.last() {
        let f = faithfulness(&[last.mean_d_real], &[last.mean_d_fake])?;
        println!(
            "discriminator at final epoch: D(real) {:.3}, D(fake) {:.3}, {}",
            f.mean_real,
            f.mean_fake,
            if f.faithful { "faithful" } else { "not faithful" }
        );
    }
    match failure {
        Some(f) => Err(f.into()),
        None => Ok(()),
    }
}

fn cmd_compare(args: &RunArgs) -> Result<()> {
    let config = args.load()?;
    let outputs = run_compare(&config)?;
    for v in &outputs.summary.variants {
        print!("{:<28} completed {:>3}  failed {:>3}", v.name, v.completed, v.failed);
        if let Some(e) = &v.early_stage {
            print!(
                "  early RI {:+.1}%  p = {:.4}{}",
                100.0 * e.relative_improvement,
                e.p_value,
                if e.in_reported_band { "  (within 5-50%)" } else { "" }
            );
        }
        println!();
    }
    println!("failed runs: {}", outputs.summary.failure_count);
    println!("manifest written to {}", outputs.manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Check => {
            let report = run_checks();
            print!("{report}");
            if report.all_passed() {
                Ok(())
            } else {
                Err(anyhow::anyhow!("one or more checks failed"))
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
