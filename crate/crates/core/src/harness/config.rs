//! Experiment configuration in a flat `key = value` format.
//!
//! ```text
//! # ring benchmark, k = 1
//! seed = 7
//! runs = 20
//! algorithms = uniform, wegan, iwgan
//! etas = 0.01, 0.1, 0.5
//! ```
//!
//! One entry per line, `#` starts a comment, list values are comma separated.
//! Unknown and repeated keys are rejected. See [`KEYS`] for the full list.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::data::NoiseFamily;
use crate::losses::{GeneratorMode, LossFamily};
use crate::metrics::{Bandwidth, Estimator};
use crate::trainer::TrainConfig;
use crate::weighting::WeightScheme;

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "base seed; runs use seed, seed+1, ... (default 0)"),
    ("runs", "number of seeds when `seeds` is not given (default 20)"),
    ("seeds", "explicit comma-separated seed list"),
    ("batch_size", "samples per batch m (default 256)"),
    ("disc_steps", "discriminator steps per generator step k (default 1)"),
    ("k", "alias of disc_steps"),
    ("iters", "generator iterations per run (default 3000)"),
    ("epoch_len", "generator iterations per metric record (default 100)"),
    ("eval_samples", "samples per MMD evaluation (default 2048)"),
    ("algorithms", "uniform | wegan | iwgan, comma separated (default uniform, wegan)"),
    ("etas", "eta values for wegan (default 0.01, 0.1, 0.5)"),
    ("eta", "alias of etas"),
    ("iwgan_clamp", "cap on importance weights before normalizing, or none (default none)"),
    ("loss", "vanilla | wasserstein, comma separated (default vanilla)"),
    ("gen_mode", "saturating | non_saturating (default saturating)"),
    ("clip", "critic parameter clip value for wasserstein (default 0.01)"),
    ("lr_g", "generator Adam learning rate (default 1e-4)"),
    ("lr_d", "discriminator Adam learning rate (default 1e-4)"),
    ("beta1", "Adam beta1 (default 0.9)"),
    ("beta2", "Adam beta2 (default 0.999)"),
    ("adam_eps", "Adam epsilon (default 1e-8)"),
    ("g_hidden", "generator hidden widths (default 32, 32)"),
    ("d_hidden", "discriminator hidden widths (default 32, 32)"),
    ("noise", "normal | uniform (default normal)"),
    ("noise_dim", "noise dimension (default 2)"),
    ("components", "ring mixture components (default 8)"),
    ("radius", "ring radius (default 3)"),
    ("cov_scale", "component covariance scale times identity (default 1)"),
    ("mmd_estimator", "unbiased | biased (default unbiased)"),
    ("bandwidth", "median | positive kernel bandwidth (default median)"),
    ("out_dir", "output directory for compare (default out)"),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value {value:?} for `{key}`: expected {expected}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
        expected: String,
    },
    #[error("eta must lie in (0, 1], got {value}")]
    EtaOutOfRange { value: f64 },
    #[error("disc_steps (k) must be at least 1, got {value}")]
    DiscSteps { value: i128 },
    #[error("batch_size (m) must be at least 1, got {value}")]
    BatchSize { value: i128 },
    #[error("IWGAN is not applicable to the wasserstein loss family")]
    IwganNotApplicable,
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// One algorithm to run: a weighting scheme under a loss family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub scheme: WeightScheme,
    pub loss: LossFamily,
}

impl Variant {
    pub fn baseline(loss: LossFamily) -> Self {
        Self {
            scheme: WeightScheme::Uniform,
            loss,
        }
    }

    pub fn is_baseline(&self) -> bool {
        self.scheme == WeightScheme::Uniform
    }

    /// File-name-safe identifier, e.g. `wegan-eta0.01-vanilla`.
    pub fn name(&self) -> String {
        match self.scheme.eta() {
            Some(eta) => format!("wegan-eta{eta}-{}", self.loss.name()),
            None => format!("{}-{}", self.scheme.algorithm(), self.loss.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Shared hyperparameters; `scheme`, `loss` and `seed` are set per run.
    pub template: TrainConfig,
    /// User-listed variants in order, followed by any missing baselines.
    pub variants: Vec<Variant>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Training configuration for one (variant, seed) run.
    pub fn run_config(&self, variant: &Variant, seed: u64) -> TrainConfig {
        TrainConfig {
            scheme: variant.scheme,
            loss: variant.loss,
            seed,
            ..self.template.clone()
        }
    }

    /// The baseline sharing `variant`'s loss family.
    pub fn baseline_for(&self, variant: &Variant) -> Variant {
        Variant::baseline(variant.loss)
    }

    /// Configuration of the single run used by `train`: the first listed
    /// variant under the first seed.
    pub fn primary_run(&self) -> TrainConfig {
        self.run_config(&self.variants[0], self.seeds[0])
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_with_overrides(text, &[])
}

/// Parses `text`, then applies `overrides` (key, value) on top; an override
/// replaces the file's value for the same key (aliases included).
pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig, ConfigError> {
    let mut entries = parse_entries(text)?;
    for (key, value) in overrides {
        let key = canonical_key(key).ok_or_else(|| ConfigError::UnknownKey {
            line: 0,
            key: key.clone(),
        })?;
        // An explicit base seed replaces any seed list from the file.
        entries.retain(|e| e.key != key && !(key == "seed" && e.key == "seeds"));
        entries.push(Entry {
            line: 0,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    build(&entries)
}

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = match key {
        "k" => "disc_steps",
        "eta" => "etas",
        other => other,
    };
    KEYS.iter().map(|(k, _)| *k).find(|k| *k == key)
}

fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        }
        let canonical = canonical_key(key).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: key.to_string(),
        })?;
        if entries.iter().any(|e| e.key == canonical) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        entries.push(Entry {
            line,
            key: canonical.to_string(),
            value: value.to_string(),
        });
    }
    Ok(entries)
}

fn invalid(e: &Entry, expected: &str) -> ConfigError {
    ConfigError::InvalidValue {
        line: e.line,
        key: e.key.clone(),
        value: e.value.clone(),
        expected: expected.to_string(),
    }
}

fn list(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).collect()
}

fn int(e: &Entry) -> Result<i128, ConfigError> {
    e.value.parse::<i128>().map_err(|_| invalid(e, "an integer"))
}

fn count(e: &Entry, min: i128) -> Result<usize, ConfigError> {
    let v = int(e)?;
    if v < min || v > usize::MAX as i128 {
        return Err(invalid(e, &format!("an integer >= {min}")));
    }
    Ok(v as usize)
}

fn real(e: &Entry, s: &str) -> Result<f64, ConfigError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(invalid(e, "a finite number")),
    }
}

fn positive(e: &Entry) -> Result<f64, ConfigError> {
    let v = real(e, &e.value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(e, "a positive number"))
    }
}

fn widths(e: &Entry) -> Result<Vec<usize>, ConfigError> {
    list(&e.value)
        .into_iter()
        .map(|s| match s.parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(invalid(e, "comma-separated positive integers")),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Algo {
    Uniform,
    Wegan,
    Iwgan,
}

fn build(entries: &[Entry]) -> Result<ExperimentConfig, ConfigError> {
    let mut t = TrainConfig::default();
    let mut seed: u64 = 0;
    let mut runs: usize = 20;
    let mut seeds: Option<Vec<u64>> = None;
    let mut algos = vec![Algo::Uniform, Algo::Wegan];
    let mut etas = vec![0.01, 0.1, 0.5];
    let mut clamp: Option<f64> = None;
    let mut losses = vec!["vanilla".to_string()];
    let mut gen_mode = GeneratorMode::Saturating;
    let mut clip = LossFamily::DEFAULT_CLIP;
    let mut out_dir = PathBuf::from("out");

    for e in entries {
        match e.key.as_str() {
            "seed" => seed = e.value.parse().map_err(|_| invalid(e, "an unsigned 64-bit integer"))?,
            "runs" => runs = count(e, 1)?,
            "seeds" => {
                let parsed = list(&e.value)
                    .into_iter()
                    .map(|s| s.parse::<u64>().map_err(|_| invalid(e, "comma-separated unsigned integers")))
                    .collect::<Result<Vec<_>, _>>()?;
                seeds = Some(parsed);
            }
            "batch_size" => {
                let v = int(e)?;
                if v < 1 {
                    return Err(ConfigError::BatchSize { value: v });
                }
                t.batch_size = usize::try_from(v).map_err(|_| invalid(e, "a batch size that fits in memory"))?;
            }
            "disc_steps" => {
                let v = int(e)?;
                if v < 1 {
                    return Err(ConfigError::DiscSteps { value: v });
                }
                t.disc_steps = usize::try_from(v).map_err(|_| invalid(e, "a smaller step count"))?;
            }
            "iters" => t.iterations = count(e, 0)?,
            "epoch_len" => t.epoch_len = count(e, 1)?,
            "eval_samples" => t.eval_samples = count(e, 2)?,
            "algorithms" => {
                algos = list(&e.value)
                    .into_iter()
                    .map(|s| match s {
                        "uniform" | "baseline" | "vanilla" => Ok(Algo::Uniform),
                        "wegan" => Ok(Algo::Wegan),
                        "iwgan" => Ok(Algo::Iwgan),
                        _ => Err(invalid(e, "uniform, wegan or iwgan")),
                    })
                    .collect::<Result<_, _>>()?;
            }
            "etas" => {
                etas = list(&e.value)
                    .into_iter()
                    .map(|s| real(e, s))
                    .collect::<Result<_, _>>()?;
                if let Some(&bad) = etas.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
                    return Err(ConfigError::EtaOutOfRange { value: bad });
                }
            }
            "iwgan_clamp" => {
                clamp = match e.value.as_str() {
                    "none" | "off" => None,
                    _ => Some(positive(e)?),
                }
            }
            "loss" => {
                losses = list(&e.value).into_iter().map(str::to_string).collect();
                if losses.iter().any(|l| l != "vanilla" && l != "wasserstein") {
                    return Err(invalid(e, "vanilla or wasserstein"));
                }
            }
            "gen_mode" => {
                gen_mode = match e.value.as_str() {
                    "saturating" => GeneratorMode::Saturating,
                    "non_saturating" | "non-saturating" => GeneratorMode::NonSaturating,
                    _ => return Err(invalid(e, "saturating or non_saturating")),
                }
            }
            "clip" => clip = positive(e)?,
            "lr_g" => t.gen_adam.lr = nonnegative(e)?,
            "lr_d" => t.disc_adam.lr = nonnegative(e)?,
            "beta1" => {
                let b = unit_interval(e)?;
                t.gen_adam.beta1 = b;
                t.disc_adam.beta1 = b;
            }
            "beta2" => {
                let b = unit_interval(e)?;
                t.gen_adam.beta2 = b;
                t.disc_adam.beta2 = b;
            }
            "adam_eps" => {
                let v = positive(e)?;
                t.gen_adam.eps = v;
                t.disc_adam.eps = v;
            }
            "g_hidden" => t.gen_hidden = widths(e)?,
            "d_hidden" => t.disc_hidden = widths(e)?,
            "noise" => {
                t.noise.family = match e.value.as_str() {
                    "normal" | "standard_normal" => NoiseFamily::StandardNormal,
                    "uniform" => NoiseFamily::Uniform,
                    _ => return Err(invalid(e, "normal or uniform")),
                }
            }
            "noise_dim" => t.noise.dim = count(e, 1)?,
            "components" => t.data.component_count = count(e, 1)?,
            "radius" => {
                let r = real(e, &e.value)?;
                if r < 0.0 {
                    return Err(invalid(e, "a nonnegative radius"));
                }
                t.data.radius = r;
            }
            "cov_scale" => t.data.covariance_scale = positive(e)?,
            "mmd_estimator" => {
                t.mmd.estimator = match e.value.as_str() {
                    "unbiased" => Estimator::Unbiased,
                    "biased" => Estimator::Biased,
                    _ => return Err(invalid(e, "unbiased or biased")),
                }
            }
            "bandwidth" => {
                t.mmd.bandwidth = match e.value.as_str() {
                    "median" => Bandwidth::Median,
                    _ => Bandwidth::Fixed(positive(e)?),
                }
            }
            "out_dir" => out_dir = PathBuf::from(&e.value),
            other => unreachable!("key {other} passed canonical_key"),
        }
    }

    let seeds = match seeds {
        Some(s) if s.is_empty() => return Err(ConfigError::Invalid("seed list is empty".into())),
        Some(s) => s,
        None => (0..runs as u64).map(|i| seed.wrapping_add(i)).collect(),
    };

    let families: Vec<LossFamily> = losses
        .iter()
        .map(|l| match l.as_str() {
            "wasserstein" => LossFamily::Wasserstein { clip },
            _ => LossFamily::Vanilla { mode: gen_mode },
        })
        .collect();

    let mut variants = Vec::new();
    for loss in &families {
        for algo in &algos {
            let schemes: Vec<WeightScheme> = match algo {
                Algo::Uniform => vec![WeightScheme::Uniform],
                Algo::Wegan => etas.iter().map(|&eta| WeightScheme::Wegan { eta }).collect(),
                Algo::Iwgan => {
                    if loss.is_wasserstein() {
                        return Err(ConfigError::IwganNotApplicable);
                    }
                    vec![WeightScheme::Iwgan { clamp }]
                }
            };
            for scheme in schemes {
                let v = Variant { scheme, loss: *loss };
                if !variants.contains(&v) {
                    variants.push(v);
                }
            }
        }
    }
    for loss in &families {
        let base = Variant::baseline(*loss);
        if !variants.contains(&base) {
            variants.push(base);
        }
    }

    t.seed = seeds[0];
    t.scheme = variants[0].scheme;
    t.loss = variants[0].loss;
    t.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;

    Ok(ExperimentConfig {
        template: t,
        variants,
        seeds,
        out_dir,
    })
}

fn nonnegative(e: &Entry) -> Result<f64, ConfigError> {
    let v = real(e, &e.value)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(e, "a nonnegative number"))
    }
}

fn unit_interval(e: &Entry) -> Result<f64, ConfigError> {
    let v = real(e, &e.value)?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(e, "a number in [0, 1)"))
    }
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Renders `config` back into the key-value format. Parsing the result yields
/// an equal configuration.
pub fn render_config(config: &ExperimentConfig) -> String {
    let t = &config.template;
    let mut algos: Vec<&str> = Vec::new();
    let mut etas: Vec<f64> = Vec::new();
    let mut losses: Vec<&str> = Vec::new();
    let mut clamp = None;
    let mut gen_mode = GeneratorMode::Saturating;
    let mut clip = LossFamily::DEFAULT_CLIP;
    for v in &config.variants {
        let a = v.scheme.algorithm();
        if !algos.contains(&a) {
            algos.push(a);
        }
        match v.scheme {
            WeightScheme::Wegan { eta } if !etas.contains(&eta) => etas.push(eta),
            WeightScheme::Iwgan { clamp: c } => clamp = c,
            _ => {}
        }
        if !losses.contains(&v.loss.name()) {
            losses.push(v.loss.name());
        }
        match v.loss {
            LossFamily::Vanilla { mode } => gen_mode = mode,
            LossFamily::Wasserstein { clip: c } => clip = c,
        }
    }
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("seeds", join(&config.seeds));
    put("batch_size", t.batch_size.to_string());
    put("disc_steps", t.disc_steps.to_string());
    put("iters", t.iterations.to_string());
    put("epoch_len", t.epoch_len.to_string());
    put("eval_samples", t.eval_samples.to_string());
    put("algorithms", algos.join(", "));
    if !etas.is_empty() {
        put("etas", join(&etas));
    }
    put("iwgan_clamp", clamp.map_or("none".to_string(), |c| c.to_string()));
    put("loss", losses.join(", "));
    put(
        "gen_mode",
        match gen_mode {
            GeneratorMode::Saturating => "saturating",
            GeneratorMode::NonSaturating => "non_saturating",
        }
        .to_string(),
    );
    put("clip", clip.to_string());
    put("lr_g", t.gen_adam.lr.to_string());
    put("lr_d", t.disc_adam.lr.to_string());
    put("beta1", t.gen_adam.beta1.to_string());
    put("beta2", t.gen_adam.beta2.to_string());
    put("adam_eps", t.gen_adam.eps.to_string());
    put("g_hidden", join(&t.gen_hidden));
    put("d_hidden", join(&t.disc_hidden));
    put(
        "noise",
        match t.noise.family {
            NoiseFamily::StandardNormal => "normal",
            NoiseFamily::Uniform => "uniform",
        }
        .to_string(),
    );
    put("noise_dim", t.noise.dim.to_string());
    put("components", t.data.component_count.to_string());
    put("radius", t.data.radius.to_string());
    put("cov_scale", t.data.covariance_scale.to_string());
    put(
        "mmd_estimator",
        match t.mmd.estimator {
            Estimator::Unbiased => "unbiased",
            Estimator::Biased => "biased",
        }
        .to_string(),
    );
    put(
        "bandwidth",
        match t.mmd.bandwidth {
            Bandwidth::Median => "median".to_string(),
            Bandwidth::Fixed(s) => s.to_string(),
        },
    );
    put("out_dir", config.out_dir.display().to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config_str("seed = 7\n").unwrap();
        assert_eq!(c.template.batch_size, 256);
        assert_eq!(c.template.disc_steps, 1);
        assert_eq!(c.template.iterations, 3000);
        assert_eq!(c.template.data.component_count, 8);
        assert_eq!(c.template.data.radius, 3.0);
        assert_eq!(c.seeds, (7..27).collect::<Vec<_>>());
        assert!(c.variants.iter().all(|v| v.loss == LossFamily::default()));
        assert_eq!(c.variants[0], Variant::baseline(LossFamily::default()));
        let names: Vec<String> = c.variants.iter().map(Variant::name).collect();
        assert_eq!(
            names,
            ["uniform-vanilla", "wegan-eta0.01-vanilla", "wegan-eta0.1-vanilla", "wegan-eta0.5-vanilla"]
        );
    }

    #[test]
    fn eta_out_of_range() {
        let err = parse_config_str("eta = 1.5").unwrap_err();
        assert!(matches!(err, ConfigError::EtaOutOfRange { value } if value == 1.5));
        assert!(err.to_string().contains("(0, 1]"));
        assert!(matches!(parse_config_str("etas = 0.5, 0"), Err(ConfigError::EtaOutOfRange { .. })));
    }

    #[test]
    fn iwgan_with_wasserstein_rejected() {
        let err = parse_config_str("algorithms = iwgan\nloss = wasserstein").unwrap_err();
        assert!(matches!(err, ConfigError::IwganNotApplicable));
        assert!(err.to_string().contains("IWGAN is not applicable"));
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(parse_config_str("k = 0"), Err(ConfigError::DiscSteps { value: 0 })));
        assert!(matches!(parse_config_str("disc_steps = -3"), Err(ConfigError::DiscSteps { value: -3 })));
        assert!(matches!(parse_config_str("batch_size = 0"), Err(ConfigError::BatchSize { value: 0 })));
        assert!(matches!(parse_config_str("seed 7"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config_str("\ncolour = red"), Err(ConfigError::UnknownKey { line: 2, .. })));
        assert!(matches!(parse_config_str("seed = 1\nseed = 2"), Err(ConfigError::DuplicateKey { line: 2, .. })));
        assert!(matches!(parse_config_str("k = 1\ndisc_steps = 2"), Err(ConfigError::DuplicateKey { .. })));
        assert!(matches!(parse_config_str("radius = abc"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(
            parse_config(Path::new("/nonexistent/wegan.cfg")),
            Err(ConfigError::Io { .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config_str("# header\n\nseed = 3 # trailing\nruns = 2\n").unwrap();
        assert_eq!(c.seeds, vec![3, 4]);
    }

    #[test]
    fn baseline_added_per_family() {
        let c = parse_config_str("algorithms = wegan\netas = 0.5, 0.9\nloss = vanilla, wasserstein").unwrap();
        assert_eq!(c.variants.len(), 6);
        assert_eq!(c.variants[0].scheme, WeightScheme::Wegan { eta: 0.5 });
        assert!(c.variants.contains(&Variant::baseline(LossFamily::Wasserstein { clip: 0.01 })));
        assert_eq!(c.primary_run().scheme, WeightScheme::Wegan { eta: 0.5 });
    }

    #[test]
    fn overrides_replace_file_values() {
        let ov = vec![("k".to_string(), "5".to_string()), ("eta".to_string(), "0.1".to_string())];
        let c = parse_with_overrides("disc_steps = 2\netas = 0.5", &ov).unwrap();
        assert_eq!(c.template.disc_steps, 5);
        assert!(c.variants.contains(&Variant {
            scheme: WeightScheme::Wegan { eta: 0.1 },
            loss: LossFamily::default()
        }));
        let bad = vec![("eta".to_string(), "2".to_string())];
        assert!(matches!(parse_with_overrides("", &bad), Err(ConfigError::EtaOutOfRange { .. })));
    }

    #[test]
    fn render_round_trips() {
        let text = "seeds = 4, 9\nalgorithms = iwgan, wegan\netas = 0.25\niwgan_clamp = 50\nk = 5\n\
                    g_hidden = 16, 8\nbandwidth = 0.7\nnoise = uniform\nlr_d = 0.0003\ngen_mode = non_saturating";
        let c = parse_config_str(text).unwrap();
        let again = parse_config_str(&render_config(&c)).unwrap();
        assert_eq!(c, again);
    }
}
