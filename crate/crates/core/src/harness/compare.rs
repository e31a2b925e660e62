//! Multi-seed comparison of weighting schemes against the uniform baseline.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::config::{render_config, ExperimentConfig, Variant};
use super::trace_csv::{fmt_f64, write_trace_csv, RunLabels, TraceCsvError};
use crate::stats::{mean_std, paired_t_test, PairedTest};
use crate::trainer::{train, MetricTrace, TrainConfig, TrainFailure};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Trace(#[from] TraceCsvError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub variant: Variant,
    pub seed: u64,
    pub result: Result<MetricTrace, TrainFailure>,
}

impl RunOutcome {
    pub fn run_id(&self) -> String {
        format!("{}-seed{}", self.variant.name(), self.seed)
    }
}

/// Every (variant, seed) outcome, in variant-major, seed-minor order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub outcomes: Vec<RunOutcome>,
}

impl SweepResult {
    /// Completed traces of `variant`, sorted by seed.
    pub fn traces(&self, variant: &Variant) -> Vec<(u64, &MetricTrace)> {
        let mut out: Vec<(u64, &MetricTrace)> = self
            .outcomes
            .iter()
            .filter(|o| o.variant == *variant)
            .filter_map(|o| o.result.as_ref().ok().map(|t| (o.seed, t)))
            .collect();
        out.sort_by_key(|(s, _)| *s);
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &RunOutcome> {
        self.outcomes.iter().filter(|o| o.result.is_err())
    }

    pub fn failure_count(&self, variant: &Variant) -> usize {
        self.failures().filter(|o| o.variant == *variant).count()
    }
}

pub fn run_sweep(config: &ExperimentConfig) -> SweepResult {
    run_sweep_with(config, train)
}

/// Runs every (variant, seed) pair with `runner`. Runs are independent and
/// execute in parallel; the result order does not depend on scheduling.
pub fn run_sweep_with<F>(config: &ExperimentConfig, runner: F) -> SweepResult
where
    F: Fn(&TrainConfig) -> Result<MetricTrace, TrainFailure> + Sync,
{
    let jobs: Vec<(Variant, u64)> = config
        .variants
        .iter()
        .flat_map(|v| config.seeds.iter().map(move |&s| (*v, s)))
        .collect();
    let outcomes = jobs
        .into_par_iter()
        .map(|(variant, seed)| RunOutcome {
            variant,
            seed,
            result: runner(&config.run_config(&variant, seed)),
        })
        .collect();
    SweepResult { outcomes }
}

/// Cross-seed statistics at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub epoch: usize,
    pub gen_iter: usize,
    pub runs: usize,
    pub mmd_mean: f64,
    pub mmd_std: f64,
    pub weight_var_mean: f64,
    pub mean_d_real_mean: f64,
    pub mean_d_fake_mean: f64,
    pub disc_loss_mean: f64,
    pub gen_loss_mean: f64,
}

/// Per-epoch means across traces. Traces are reduced in seed order, so the
/// result does not depend on the order they are passed in.
pub fn aggregate(traces: &[(u64, &MetricTrace)]) -> Vec<AggregateRow> {
    let mut sorted = traces.to_vec();
    sorted.sort_by_key(|(s, _)| *s);
    let Some(epochs) = sorted.iter().map(|(_, t)| t.len()).min() else {
        return Vec::new();
    };
    (0..epochs)
        .map(|e| {
            let col = |f: fn(&crate::trainer::EpochRecord) -> f64| -> Vec<f64> {
                sorted.iter().map(|(_, t)| f(&t.records[e])).collect()
            };
            let mean = |v: Vec<f64>| mean_std(&v).0;
            let (mmd_mean, mmd_std) = mean_std(&col(|r| r.mmd));
            let first = &sorted[0].1.records[e];
            AggregateRow {
                epoch: first.epoch,
                gen_iter: first.gen_iter,
                runs: sorted.len(),
                mmd_mean,
                mmd_std,
                weight_var_mean: mean(col(|r| r.weight_var)),
                mean_d_real_mean: mean(col(|r| r.mean_d_real)),
                mean_d_fake_mean: mean(col(|r| r.mean_d_fake)),
                disc_loss_mean: mean(col(|r| r.disc_loss)),
                gen_loss_mean: mean(col(|r| r.gen_loss)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementPoint {
    pub epoch: usize,
    pub gen_iter: usize,
    pub mmd_base: f64,
    pub mmd_variant: f64,
    /// `(base - variant) / base`; `None` where the baseline mean is not positive.
    pub relative_improvement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementSeries {
    pub points: Vec<ImprovementPoint>,
    pub seeds: usize,
    pub failed_runs: usize,
}

pub fn relative_improvement(base: f64, variant: f64) -> Option<f64> {
    (base > 0.0).then(|| (base - variant) / base)
}

pub fn improvement_series(base: &[AggregateRow], variant: &[AggregateRow], failed_runs: usize) -> ImprovementSeries {
    let points = base
        .iter()
        .zip(variant)
        .map(|(b, v)| ImprovementPoint {
            epoch: b.epoch,
            gen_iter: b.gen_iter,
            mmd_base: b.mmd_mean,
            mmd_variant: v.mmd_mean,
            relative_improvement: relative_improvement(b.mmd_mean, v.mmd_mean),
        })
        .collect();
    ImprovementSeries {
        points,
        seeds: variant.first().map_or(0, |r| r.runs),
        failed_runs,
    }
}

/// Paired comparison over the early-stage epochs (the first third).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EarlyStageComparison {
    pub epochs: usize,
    pub pairs: usize,
    pub mmd_base: f64,
    pub mmd_variant: f64,
    pub relative_improvement: f64,
    pub t: f64,
    pub p_value: f64,
    /// Whether the improvement lies in the 5%..50% range.
    pub in_reported_band: bool,
}

/// Number of epochs treated as the early stage for a trace of `total` epochs.
pub fn early_epochs(total: usize) -> usize {
    total.div_ceil(3)
}

/// Compares `variant` with its baseline on seeds where both runs completed:
/// each seed contributes its mean MMD over the early epochs; the per-seed
/// differences (baseline minus variant) go into a one-sided paired t-test.
pub fn early_stage_comparison(sweep: &SweepResult, base: &Variant, variant: &Variant) -> Option<EarlyStageComparison> {
    let base_traces = sweep.traces(base);
    let var_traces = sweep.traces(variant);
    let total = base_traces.iter().chain(&var_traces).map(|(_, t)| t.len()).min()?;
    let epochs = early_epochs(total);
    if epochs == 0 {
        return None;
    }
    let window = |t: &MetricTrace| t.records[..epochs].iter().map(|r| r.mmd).sum::<f64>() / epochs as f64;
    let mut b_means = Vec::new();
    let mut v_means = Vec::new();
    for (seed, bt) in &base_traces {
        if let Some((_, vt)) = var_traces.iter().find(|(s, _)| s == seed) {
            b_means.push(window(bt));
            v_means.push(window(vt));
        }
    }
    let diffs: Vec<f64> = b_means.iter().zip(&v_means).map(|(b, v)| b - v).collect();
    let test: PairedTest = paired_t_test(&diffs)?;
    let mmd_base = mean_std(&b_means).0;
    let mmd_variant = mean_std(&v_means).0;
    let ri = relative_improvement(mmd_base, mmd_variant)?;
    Some(EarlyStageComparison {
        epochs,
        pairs: test.n,
        mmd_base,
        mmd_variant,
        relative_improvement: ri,
        t: test.t,
        p_value: test.p_value,
        in_reported_band: (0.05..=0.5).contains(&ri),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureEntry {
    pub run_id: String,
    pub variant: String,
    pub seed: u64,
    pub gen_iter: usize,
    pub partial_records: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantSummary {
    pub name: String,
    pub algorithm: String,
    pub eta: Option<f64>,
    pub loss_family: String,
    pub baseline: String,
    pub completed: usize,
    pub failed: usize,
    pub early_stage: Option<EarlyStageComparison>,
}

/// Contents of `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config: String,
    pub seeds: Vec<u64>,
    pub variants: Vec<VariantSummary>,
    pub failure_count: usize,
    pub failures: Vec<FailureEntry>,
}

pub fn build_manifest(config: &ExperimentConfig, sweep: &SweepResult) -> Manifest {
    let variants = config
        .variants
        .iter()
        .map(|v| {
            let base = config.baseline_for(v);
            VariantSummary {
                name: v.name(),
                algorithm: v.scheme.algorithm().to_string(),
                eta: v.scheme.eta(),
                loss_family: v.loss.name().to_string(),
                baseline: base.name(),
                completed: sweep.traces(v).len(),
                failed: sweep.failure_count(v),
                early_stage: if v.is_baseline() {
                    None
                } else {
                    early_stage_comparison(sweep, &base, v)
                },
            }
        })
        .collect();
    let failures: Vec<FailureEntry> = sweep
        .failures()
        .map(|o| {
            let f = o.result.as_ref().unwrap_err();
            FailureEntry {
                run_id: o.run_id(),
                variant: o.variant.name(),
                seed: o.seed,
                gen_iter: f.gen_iter,
                partial_records: f.trace.len(),
                error: f.error.to_string(),
            }
        })
        .collect();
    Manifest {
        config: render_config(config),
        seeds: config.seeds.clone(),
        variants,
        failure_count: failures.len(),
        failures,
    }
}

fn eta_field(v: &Variant) -> String {
    v.scheme.eta().map(fmt_f64).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, HarnessError> {
    Ok(BufWriter::new(fs::File::create(path).map_err(io_err(path))?))
}

fn write_aggregate(path: &Path, v: &Variant, rows: &[AggregateRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "algorithm",
        "eta",
        "loss_family",
        "epoch",
        "gen_iter",
        "runs",
        "mmd_mean",
        "mmd_std",
        "weight_var_mean",
        "mean_d_real_mean",
        "mean_d_fake_mean",
        "disc_loss_mean",
        "gen_loss_mean",
    ])?;
    for r in rows {
        w.write_record([
            v.scheme.algorithm().to_string(),
            eta_field(v),
            v.loss.name().to_string(),
            r.epoch.to_string(),
            r.gen_iter.to_string(),
            r.runs.to_string(),
            fmt_f64(r.mmd_mean),
            fmt_f64(r.mmd_std),
            fmt_f64(r.weight_var_mean),
            fmt_f64(r.mean_d_real_mean),
            fmt_f64(r.mean_d_fake_mean),
            fmt_f64(r.disc_loss_mean),
            fmt_f64(r.gen_loss_mean),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_improvement(path: &Path, v: &Variant, series: &ImprovementSeries) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "algorithm",
        "eta",
        "loss_family",
        "epoch",
        "gen_iter",
        "mmd_base",
        "mmd_variant",
        "relative_improvement",
        "seeds",
        "failed_runs",
    ])?;
    for p in &series.points {
        w.write_record([
            v.scheme.algorithm().to_string(),
            eta_field(v),
            v.loss.name().to_string(),
            p.epoch.to_string(),
            p.gen_iter.to_string(),
            fmt_f64(p.mmd_base),
            fmt_f64(p.mmd_variant),
            p.relative_improvement.map(fmt_f64).unwrap_or_default(),
            series.seeds.to_string(),
            series.failed_runs.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct CompareOutputs {
    pub traces: Vec<PathBuf>,
    pub aggregates: Vec<PathBuf>,
    pub improvements: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: Manifest,
}

/// Writes `out_dir/traces/<run_id>.csv` for each completed run,
/// `aggregate_<variant>.csv` per variant, `improvement_<variant>.csv` per
/// non-baseline variant and `manifest.json`.
pub fn write_outputs(config: &ExperimentConfig, sweep: &SweepResult, out_dir: &Path) -> Result<CompareOutputs, HarnessError> {
    let trace_dir = out_dir.join("traces");
    fs::create_dir_all(&trace_dir).map_err(io_err(&trace_dir))?;
    let mut traces = Vec::new();
    for o in &sweep.outcomes {
        let Ok(trace) = &o.result else { continue };
        let run_id = o.run_id();
        let path = trace_dir.join(format!("{run_id}.csv"));
        let labels = RunLabels {
            run_id: &run_id,
            seed: o.seed,
            algorithm: o.variant.scheme.algorithm(),
            eta: o.variant.scheme.eta(),
            loss_family: o.variant.loss.name(),
        };
        write_trace_csv(create(&path)?, &labels, trace)?;
        traces.push(path);
    }
    let mut aggregates = Vec::new();
    let mut improvements = Vec::new();
    for v in &config.variants {
        let rows = aggregate(&sweep.traces(v));
        let path = out_dir.join(format!("aggregate_{}.csv", v.name()));
        write_aggregate(&path, v, &rows)?;
        aggregates.push(path);
        if !v.is_baseline() {
            let base_rows = aggregate(&sweep.traces(&config.baseline_for(v)));
            let series = improvement_series(&base_rows, &rows, sweep.failure_count(v));
            let path = out_dir.join(format!("improvement_{}.csv", v.name()));
            write_improvement(&path, v, &series)?;
            improvements.push(path);
        }
    }
    let summary = build_manifest(config, sweep);
    let manifest = out_dir.join("manifest.json");
    let mut f = create(&manifest)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    std::io::Write::flush(&mut f).map_err(io_err(&manifest))?;
    Ok(CompareOutputs {
        traces,
        aggregates,
        improvements,
        manifest,
        summary,
    })
}

/// Runs the full sweep and writes all outputs under `config.out_dir`.
pub fn run_compare(config: &ExperimentConfig) -> Result<CompareOutputs, HarnessError> {
    let sweep = run_sweep(config);
    write_outputs(config, &sweep, &config.out_dir)
}
