//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use wegan::harness::checks::{gradient_rel_error, random_gradient_case, random_margin_instance, random_sample_set};
use wegan::harness::compare::early_stage_comparison;
use wegan::harness::{parse_config_str, run_compare, run_sweep, ConfigError};
use wegan::losses::LossFamily;
use wegan::metrics::{median_heuristic, mmd2, Bandwidth, Estimator, MmdConfig};
use wegan::oracle::{finite_difference_grad, naive_median_distance, naive_mmd2};
use wegan::rng::RngStream;
use wegan::weighting::{iwgan_weights, loss_margin, wegan_weights, weight_variance};
use wegan::{train, Error, TrainConfig, Trainer, WeightScheme};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_margin_sweep() -> Outcome {
    let mut rng = RngStream::from_seed(2001);
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for i in 0..10_000 {
        let (d, eta) = random_margin_instance(&mut rng);
        ensure((2..=64).contains(&d.len()) && eta > 0.0 && eta <= 1.0, || format!("instance {i} out of range"))?;
        let margin = loss_margin(&d, eta).map_err(|e| e.to_string())?;
        worst = worst.min(margin);
        ensure(margin >= -1e-12, || format!("instance {i}: margin {margin:e}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("10000 instances, min margin {worst:.3e}, {elapsed:.2?}"))
}

fn c2_equilibrium_weights() -> Outcome {
    let etas = [1e-6, 0.01, 0.1, 0.5, 0.9, 1.0];
    for m in 1..=256 {
        for &eta in &etas {
            let w = wegan_weights(&vec![0.5; m], eta).map_err(|e| e.to_string())?;
            let target = 1.0 / m as f64;
            ensure(w.values().iter().all(|x| (x - target).abs() <= 1e-15), || format!("m={m} eta={eta}: not uniform"))?;
            let var = weight_variance(w.values());
            ensure(var == 0.0, || format!("m={m} eta={eta}: variance {var:e}"))?;
        }
    }
    Ok(format!("m in 1..=256 x {} eta values, all weights 1/m, variance 0", etas.len()))
}

fn c3_eta_one_equivalence() -> Outcome {
    let base = TrainConfig { iterations: 500, seed: 2003, ..TrainConfig::default() };
    let eta1 = TrainConfig { scheme: WeightScheme::Wegan { eta: 1.0 }, ..base.clone() };
    let a = train(&base).map_err(|e| e.to_string())?;
    let b = train(&eta1).map_err(|e| e.to_string())?;
    ensure(a.len() == 5, || format!("expected 5 records, got {}", a.len()))?;
    ensure(a.bitwise_eq(&b), || "traces differ".into())?;
    Ok(format!("m=256, 500 iterations, {} records bit-identical", a.len()))
}

fn c4_gradients() -> Outcome {
    let mut rng = RngStream::from_seed(2004);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let (mlp, batch, coeffs) = random_gradient_case(&mut rng, 1e-3);
        let pass = mlp.forward(&batch).map_err(|e| e.to_string())?;
        let analytic = mlp.backward(&pass.cache, &coeffs).map_err(|e| e.to_string())?;
        let numeric = finite_difference_grad(&mlp, &batch, &coeffs, 1e-5);
        for (a, n) in analytic.as_slice().iter().zip(&numeric) {
            worst = worst.max(gradient_rel_error(*a, *n));
        }
        ensure(worst < 1e-4, || format!("case {case}: relative error {worst:e}"))?;
    }
    Ok(format!("100 networks, max relative error {worst:.2e}"))
}

fn c5_mmd_oracle() -> Outcome {
    let mut rng = RngStream::from_seed(2005);
    let mut worst: f64 = 0.0;
    let mut sizes = Vec::new();
    for n in 2..=64 {
        sizes.push((n, n));
        sizes.push((n, 2 + rng.index(63)));
    }
    for (nx, ny) in sizes {
        let dim = 1 + rng.index(3);
        let x = random_sample_set(&mut rng, nx, dim);
        let y = random_sample_set(&mut rng, ny, dim);
        let pooled: Vec<Vec<f64>> = x.iter_rows().chain(y.iter_rows()).map(<[f64]>::to_vec).collect();
        let sigma = median_heuristic(&x, &y).map_err(|e| e.to_string())?;
        ensure(sigma == naive_median_distance(&pooled), || format!("n=({nx},{ny}): bandwidth mismatch"))?;
        for estimator in [Estimator::Biased, Estimator::Unbiased] {
            let fast = mmd2(&x, &y, &MmdConfig { bandwidth: Bandwidth::Median, estimator }).map_err(|e| e.to_string())?;
            worst = worst.max((fast - naive_mmd2(&x, &y, sigma, estimator)).abs());
        }
        let same = mmd2(&x, &x, &MmdConfig { bandwidth: Bandwidth::Median, estimator: Estimator::Biased })
            .map_err(|e| e.to_string())?;
        worst = worst.max(same.abs());
        ensure(worst <= 1e-12, || format!("n=({nx},{ny}): deviation {worst:e}"))?;
    }
    Ok(format!("n up to 64, both estimators, max deviation {worst:.2e}"))
}

fn c6_benchmark() -> Outcome {
    let cfg = parse_config_str("seed = 0\nruns = 20\nalgorithms = wegan\netas = 0.01\ndisc_steps = 1\nbatch_size = 256\niters = 3000\n")
        .map_err(|e| e.to_string())?;
    let sweep = run_sweep(&cfg);
    let variant = cfg.variants[0];
    let failed: usize = sweep.failures().count();
    ensure(failed == 0, || format!("{failed} runs failed"))?;
    let cmp = early_stage_comparison(&sweep, &cfg.baseline_for(&variant), &variant)
        .ok_or("no early-stage comparison")?;
    let detail = format!(
        "{} seeds, first {} epochs: MMD baseline {:.5} vs wegan {:.5}, relative improvement {:+.2}% ({} the 5-50% band), t = {:.3}, one-sided p = {:.4}",
        cmp.pairs,
        cmp.epochs,
        cmp.mmd_base,
        cmp.mmd_variant,
        100.0 * cmp.relative_improvement,
        if cmp.in_reported_band { "inside" } else { "outside" },
        cmp.t,
        cmp.p_value
    );
    ensure(cmp.mmd_variant < cmp.mmd_base && cmp.p_value < 0.05, || detail.clone())?;
    Ok(detail)
}

fn c7_iwgan_divergence(scratch: &Path) -> Outcome {
    match iwgan_weights(&[0.3, 1.0, 0.6], None) {
        Err(Error::DivergentWeight { index: 1, .. }) => {}
        other => return Err(format!("expected a divergent-weight error, got {other:?}")),
    }
    let mut cfg = parse_config_str("runs = 4\niters = 300\nepoch_len = 50\neval_samples = 256\nalgorithms = iwgan\nlr_d = 1\n")
        .map_err(|e| e.to_string())?;
    cfg.out_dir = scratch.join("iwgan");
    let out = run_compare(&cfg).map_err(|e| e.to_string())?;
    let m = &out.summary;
    let iw = m.variants.iter().find(|v| v.algorithm == "iwgan").ok_or("no iwgan entry")?;
    let base = m.variants.iter().find(|v| v.algorithm == "uniform").ok_or("no baseline entry")?;
    ensure(iw.failed > 0, || "no IWGAN run diverged".into())?;
    ensure(base.completed == 4, || format!("baseline completed {} of 4", base.completed))?;
    ensure(m.failure_count == iw.failed && m.failures.len() == m.failure_count, || "manifest failure count mismatch".into())?;
    ensure(m.failures.iter().all(|f| f.error.contains("divergent")), || "unexpected failure kind".into())?;
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out.manifest).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(json["failure_count"] == m.failure_count, || "manifest.json failure_count mismatch".into())?;
    Ok(format!(
        "d = 1 raises the divergent-weight error; sweep: {} of 4 IWGAN runs diverged, {} baseline runs completed, manifest failure_count = {}",
        iw.failed, base.completed, m.failure_count
    ))
}

fn c8_weighted_wgan() -> Outcome {
    let clip = 0.01;
    let mut updates = 0usize;
    for eta in [0.5, 0.9] {
        let cfg = TrainConfig {
            loss: LossFamily::Wasserstein { clip },
            scheme: WeightScheme::Wegan { eta },
            disc_steps: 5,
            iterations: 300,
            seed: 2008,
            ..TrainConfig::default()
        };
        let mut t = Trainer::new(cfg.clone()).map_err(|e| e.to_string())?;
        while t.gen_iter() < cfg.iterations {
            for _ in 0..cfg.disc_steps {
                t.discriminator_step().map_err(|e| e.to_string())?;
                updates += 1;
                let worst = t.discriminator().max_abs_param();
                ensure(worst <= clip, || format!("eta={eta}: critic parameter {worst} outside [-{clip}, {clip}]"))?;
            }
            t.generator_step().map_err(|e| e.to_string())?;
        }
        let trace = train(&cfg).map_err(|e| format!("eta={eta}: {e}"))?;
        ensure(trace.len() == 3 && trace.records.iter().all(|r| r.is_finite()), || format!("eta={eta}: incomplete trace"))?;
    }
    match parse_config_str("algorithms = iwgan\nloss = wasserstein\n") {
        Err(ConfigError::IwganNotApplicable) => {}
        other => return Err(format!("iwgan + wasserstein accepted: {other:?}")),
    }
    let direct = TrainConfig {
        loss: LossFamily::Wasserstein { clip },
        scheme: WeightScheme::Iwgan { clamp: None },
        ..TrainConfig::default()
    };
    ensure(matches!(direct.validate(), Err(Error::Config(_))), || "TrainConfig accepted iwgan + wasserstein".into())?;
    Ok(format!("eta 0.5 and 0.9 complete; {updates} critic updates all within [-{clip}, {clip}]; iwgan rejected"))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("traces")] {
        for entry in fs::read_dir(&sub).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "csv") {
                files.push((path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn c9_reproducibility(scratch: &Path) -> Outcome {
    let text = "seed = 9\nruns = 3\niters = 400\neval_samples = 512\nalgorithms = uniform, wegan, iwgan\netas = 0.01, 0.5\niwgan_clamp = 20\n";
    let mut outputs = Vec::new();
    for name in ["first", "second"] {
        let mut cfg = parse_config_str(text).map_err(|e| e.to_string())?;
        cfg.out_dir = scratch.join(name);
        run_compare(&cfg).map_err(|e| e.to_string())?;
        outputs.push(csv_files(&cfg.out_dir));
    }
    ensure(!outputs[0].is_empty(), || "no CSV written".into())?;
    ensure(outputs[0] == outputs[1], || "CSV content differs between runs".into())?;
    let bytes: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
    Ok(format!("{} CSV files ({bytes} bytes) byte-identical across reruns", outputs[0].len()))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("loss margin sweep", Box::new(c1_margin_sweep)),
        ("equilibrium weights", Box::new(c2_equilibrium_weights)),
        ("eta = 1 equivalence", Box::new(c3_eta_one_equivalence)),
        ("gradient correctness", Box::new(c4_gradients)),
        ("MMD oracle", Box::new(c5_mmd_oracle)),
        ("ring benchmark, wegan eta = 0.01", Box::new(c6_benchmark)),
        ("IWGAN divergence", Box::new(|| c7_iwgan_divergence(scratch.path()))),
        ("weighted WGAN", Box::new(c8_weighted_wgan)),
        ("reproducibility", Box::new(|| c9_reproducibility(scratch.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{status} criterion {} {name} [{:.1?}]: {detail}", i + 1, start.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
