//! Built-in property checks run by `wegan check`.

use std::fmt;

use crate::batch::Batch;
use crate::error::Result;
use crate::metrics::{median_heuristic, mmd2, Bandwidth, Estimator, MmdConfig};
use crate::nn::{Activation, Mlp, SIGMOID_FLOOR};
use crate::oracle;
use crate::rng::RngStream;
use crate::trainer::{train, TrainConfig, Trainer};
use crate::weighting::{iwgan_weights, margin_with_weights, wegan_weights, WeightScheme, WeightVector};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub name: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {:<22} seed={:<6} {}", e.name, e.seed, e.detail)?;
        }
        Ok(())
    }
}

/// Fault injection for exercising the checks themselves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Skip the normalization of multiplicative weights.
    pub corrupt_weight_normalization: bool,
}

impl CheckOptions {
    fn weights(&self, d: &[f64], eta: f64) -> Result<WeightVector> {
        if self.corrupt_weight_normalization {
            Ok(WeightVector::from_raw(d.iter().map(|di| eta.powf(1.0 - di)).collect()))
        } else {
            wegan_weights(d, eta)
        }
    }
}

pub const MARGIN_SEED: u64 = 101;
pub const SIMPLEX_SEED: u64 = 102;
pub const GRADIENT_SEED: u64 = 103;
pub const MMD_SEED: u64 = 104;
pub const EQUIVALENCE_SEED: u64 = 105;
pub const EQUILIBRIUM_SEED: u64 = 106;

/// Open-interval uniform draw.
fn open_unit(rng: &mut RngStream) -> f64 {
    loop {
        let u = rng.next_f64();
        if u > 0.0 {
            return u;
        }
    }
}

/// `(d, eta)` with `m` in `[2, 64]`, `d` in `(0, 1)^m` and `eta` in `(0, 1]`.
pub fn random_margin_instance(rng: &mut RngStream) -> (Vec<f64>, f64) {
    let m = 2 + rng.index(63);
    let d = (0..m).map(|_| open_unit(rng)).collect();
    let eta = 1.0 - rng.next_f64();
    (d, eta)
}

fn entry(name: &'static str, seed: u64, outcome: std::result::Result<String, String>) -> CheckEntry {
    match outcome {
        Ok(detail) => CheckEntry { name, seed, passed: true, detail },
        Err(detail) => CheckEntry { name, seed, passed: false, detail },
    }
}

pub fn run_checks() -> CheckReport {
    run_checks_with(CheckOptions::default())
}

pub fn run_checks_with(options: CheckOptions) -> CheckReport {
    let entries = vec![
        entry("margin_sweep", MARGIN_SEED, margin_sweep(&options, 10_000)),
        entry("weight_simplex", SIMPLEX_SEED, weight_simplex(&options, 10_000)),
        entry("equilibrium_weights", 0, equilibrium_weights(&options)),
        entry("iwgan_divergence", 0, iwgan_divergence()),
        entry("gradient_check", GRADIENT_SEED, gradient_check(100)),
        entry("mmd_oracle", MMD_SEED, mmd_oracle(40)),
        entry("eta1_equivalence", EQUIVALENCE_SEED, eta1_equivalence(200, 64)),
        entry("equilibrium_training", EQUILIBRIUM_SEED, equilibrium_training(50)),
    ];
    CheckReport { entries }
}

/// Margin between uniform and multiplicative weighting is nonnegative and
/// agrees with the difference of the two full objectives.
pub fn margin_sweep(options: &CheckOptions, instances: usize) -> std::result::Result<String, String> {
    let mut rng = RngStream::from_seed(MARGIN_SEED);
    let mut worst = f64::INFINITY;
    for i in 0..instances {
        let (d, eta) = random_margin_instance(&mut rng);
        let w = options.weights(&d, eta).map_err(|e| e.to_string())?;
        let margin = margin_with_weights(&d, w.values());
        if margin < -1e-12 {
            return Err(format!("instance {i}: margin {margin:e} < -1e-12 (m = {}, eta = {eta})", d.len()));
        }
        let real = vec![0.5; d.len()];
        let uniform = vec![1.0 / d.len() as f64; d.len()];
        let reference = oracle::weighted_objective(&real, &d, &uniform)
            - oracle::weighted_objective(&real, &d, &oracle::direct_wegan_weights(&d, eta));
        if (margin - reference).abs() > 1e-10 {
            return Err(format!("instance {i}: margin {margin} disagrees with objective gap {reference}"));
        }
        worst = worst.min(margin);
    }
    Ok(format!("{instances} instances, min margin {worst:.3e}"))
}

/// Weights lie on the simplex, follow the ordering of `d` and match the
/// direct formula.
pub fn weight_simplex(options: &CheckOptions, instances: usize) -> std::result::Result<String, String> {
    let mut rng = RngStream::from_seed(SIMPLEX_SEED);
    for i in 0..instances {
        let (d, eta) = random_margin_instance(&mut rng);
        let w = options.weights(&d, eta).map_err(|e| e.to_string())?;
        w.check_simplex().map_err(|e| format!("instance {i}: {e}"))?;
        let direct = oracle::direct_wegan_weights(&d, eta);
        for j in 0..d.len() {
            if (w.values()[j] - direct[j]).abs() > 1e-12 {
                return Err(format!("instance {i}: weight {j} differs from direct formula"));
            }
            for k in 0..d.len() {
                if d[j] >= d[k] && w.values()[j] < w.values()[k] {
                    return Err(format!("instance {i}: weights not ordered like d"));
                }
            }
        }
    }
    Ok(format!("{instances} instances on the simplex"))
}

/// `d ≡ 0.5` gives exactly uniform weights with zero variance.
pub fn equilibrium_weights(options: &CheckOptions) -> std::result::Result<String, String> {
    let etas = [1e-6, 0.01, 0.1, 0.5, 0.9, 1.0];
    for m in 1..=64 {
        for &eta in &etas {
            let w = options.weights(&vec![0.5; m], eta).map_err(|e| e.to_string())?;
            let target = 1.0 / m as f64;
            if let Some(x) = w.values().iter().find(|x| (*x - target).abs() > 1e-15) {
                return Err(format!("m = {m}, eta = {eta}: weight {x} != 1/m"));
            }
            if w.variance() != 0.0 {
                return Err(format!("m = {m}, eta = {eta}: variance {}", w.variance()));
            }
        }
    }
    Ok(format!("m in 1..=64 x {} eta values uniform", etas.len()))
}

pub fn iwgan_divergence() -> std::result::Result<String, String> {
    match iwgan_weights(&[0.2, 1.0, 0.4], None) {
        Err(Error::DivergentWeight { index: 1, .. }) => Ok("d = 1 raises the divergent-weight error".into()),
        other => Err(format!("expected a divergent-weight error, got {other:?}")),
    }
}

/// Random small network, batch and seed coefficients, with every hidden
/// pre-activation at least `margin` away from the rectifier kink so central
/// differences are valid.
pub fn random_gradient_case(rng: &mut RngStream, margin: f64) -> (Mlp, Batch, Vec<f64>) {
    loop {
        let input = 1 + rng.index(4);
        let hidden_layers = 1 + rng.index(2);
        let mut dims = vec![input];
        dims.extend((0..hidden_layers).map(|_| 1 + rng.index(8)));
        dims.push(1);
        let output = if rng.next_f64() < 0.5 { Activation::Sigmoid } else { Activation::Identity };
        let mut mlp = Mlp::init(&dims, Activation::Relu, output, rng).expect("valid dims");
        // Non-zero biases so bias gradients are exercised through the rectifier.
        let params: Vec<f64> = mlp.params().iter().map(|p| p + rng.normal(0.0, 0.1)).collect();
        mlp.set_params(params).expect("finite");
        let rows = 1 + rng.index(6);
        let batch = Batch::new(rows, input, (0..rows * input).map(|_| rng.standard_normal()).collect()).unwrap();
        let coeffs: Vec<f64> = (0..rows).map(|_| rng.normal(0.0, 1.0)).collect();
        let pass = mlp.forward(&batch).expect("forward");
        let near_kink = pass.cache.hidden_preactivations().any(|z| z.abs() < margin);
        let saturated = pass.outputs.as_slice().iter().any(|&o| {
            output == Activation::Sigmoid && !(10.0 * SIGMOID_FLOOR..=1.0 - 10.0 * SIGMOID_FLOOR).contains(&o)
        });
        if !near_kink && !saturated {
            return (mlp, batch, coeffs);
        }
    }
}

/// Relative error with a floor on the denominator for near-zero entries.
pub fn gradient_rel_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

pub fn gradient_check(cases: usize) -> std::result::Result<String, String> {
    let mut rng = RngStream::from_seed(GRADIENT_SEED);
    let mut worst: f64 = 0.0;
    for c in 0..cases {
        let (mlp, batch, coeffs) = random_gradient_case(&mut rng, 1e-3);
        let pass = mlp.forward(&batch).map_err(|e| e.to_string())?;
        let analytic = mlp.backward(&pass.cache, &coeffs).map_err(|e| e.to_string())?;
        let numeric = oracle::finite_difference_grad(&mlp, &batch, &coeffs, 1e-5);
        for (a, n) in analytic.as_slice().iter().zip(&numeric) {
            worst = worst.max(gradient_rel_error(*a, *n));
        }
        if worst >= 1e-4 {
            return Err(format!("case {c}: relative error {worst:e}"));
        }
    }
    Ok(format!("{cases} networks, max relative error {worst:.2e}"))
}

pub fn random_sample_set(rng: &mut RngStream, n: usize, dim: usize) -> Batch {
    Batch::new(n, dim, (0..n * dim).map(|_| rng.normal(0.0, 1.5)).collect()).unwrap()
}

/// Both estimators against the naive double loop, the median heuristic
/// against a full sort, and biased MMD²(X, X) = 0.
pub fn mmd_oracle(trials: usize) -> std::result::Result<String, String> {
    let mut rng = RngStream::from_seed(MMD_SEED);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let dim = 1 + rng.index(3);
        let (nx, ny) = (2 + rng.index(63), 2 + rng.index(63));
        let x = random_sample_set(&mut rng, nx, dim);
        let y = random_sample_set(&mut rng, ny, dim);
        let sigma = median_heuristic(&x, &y).map_err(|e| e.to_string())?;
        let pooled: Vec<Vec<f64>> = x.iter_rows().chain(y.iter_rows()).map(<[f64]>::to_vec).collect();
        if sigma != oracle::naive_median_distance(&pooled).max(1e-12) {
            return Err(format!("trial {t}: median heuristic mismatch"));
        }
        for estimator in [Estimator::Biased, Estimator::Unbiased] {
            let cfg = MmdConfig { bandwidth: Bandwidth::Fixed(sigma), estimator };
            let fast = mmd2(&x, &y, &cfg).map_err(|e| e.to_string())?;
            let slow = oracle::naive_mmd2(&x, &y, sigma, estimator);
            worst = worst.max((fast - slow).abs());
        }
        let same = mmd2(&x, &x, &MmdConfig { bandwidth: Bandwidth::Median, estimator: Estimator::Biased })
            .map_err(|e| e.to_string())?;
        worst = worst.max(same.abs());
        if worst > 1e-12 {
            return Err(format!("trial {t}: deviation {worst:e}"));
        }
    }
    Ok(format!("{trials} trials, max deviation {worst:.2e}"))
}

/// Small configuration shared by the training-based checks.
pub fn small_config(seed: u64, iterations: usize, batch_size: usize) -> TrainConfig {
    TrainConfig {
        batch_size,
        iterations,
        epoch_len: 50,
        eval_samples: 256,
        seed,
        ..TrainConfig::default()
    }
}

pub fn eta1_equivalence(iterations: usize, batch_size: usize) -> std::result::Result<String, String> {
    let base = small_config(EQUIVALENCE_SEED, iterations, batch_size);
    let wegan = TrainConfig { scheme: WeightScheme::Wegan { eta: 1.0 }, ..base.clone() };
    let a = train(&base).map_err(|e| e.to_string())?;
    let b = train(&wegan).map_err(|e| e.to_string())?;
    if a.bitwise_eq(&b) {
        Ok(format!("{} records bit-identical over {iterations} iterations", a.len()))
    } else {
        Err("uniform and eta = 1 traces differ".into())
    }
}

/// With a discriminator that outputs 0.5 everywhere, every generator step
/// has uniform weights.
pub fn equilibrium_training(steps: usize) -> std::result::Result<String, String> {
    let mut cfg = small_config(EQUILIBRIUM_SEED, steps, 32);
    cfg.scheme = WeightScheme::Wegan { eta: 0.01 };
    cfg.disc_adam.lr = 0.0;
    let mut trainer = Trainer::new(cfg).map_err(|e| e.to_string())?;
    let d = trainer.discriminator();
    let constant = Mlp::from_params(d.layer_dims(), Activation::Relu, Activation::Sigmoid, vec![0.0; d.param_count()])
        .map_err(|e| e.to_string())?;
    trainer.set_discriminator(constant).map_err(|e| e.to_string())?;
    for s in 0..steps {
        trainer.discriminator_step().map_err(|e| e.to_string())?;
        let stats = trainer.generator_step().map_err(|e| e.to_string())?;
        if stats.weight_variance != 0.0 {
            return Err(format!("step {s}: weight variance {}", stats.weight_variance));
        }
    }
    Ok(format!("{steps} generator steps with zero weight variance"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_normalization_is_caught() {
        let report = run_checks_with(CheckOptions { corrupt_weight_normalization: true });
        assert!(!report.all_passed());
        assert!(!report.get("weight_simplex").unwrap().passed);
        assert!(!report.get("equilibrium_weights").unwrap().passed);
    }

    #[test]
    fn fast_checks_pass() {
        let opts = CheckOptions::default();
        margin_sweep(&opts, 500).unwrap();
        weight_simplex(&opts, 200).unwrap();
        equilibrium_weights(&opts).unwrap();
        iwgan_divergence().unwrap();
        gradient_check(10).unwrap();
        mmd_oracle(5).unwrap();
    }
}
