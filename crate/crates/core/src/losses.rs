//! Adversarial losses and their gradients with respect to network outputs.
//!
//! Each function returns the loss value together with per-sample seeds
//! `d loss / d output_i`, ready to be fed into [`Mlp::backward`](crate::nn::Mlp::backward).
//! Discriminator and critic losses are maximized; generator losses are
//! minimized.

use crate::error::{Error, Result};
use crate::nn::sigmoid;
use crate::weighting::WeightVector;

/// Generator objective for the vanilla family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneratorMode {
    /// Minimize `sum w_i log(1 - D(G(z_i)))`.
    #[default]
    Saturating,
    /// Minimize `-sum w_i log D(G(z_i))`.
    NonSaturating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossFamily {
    Vanilla { mode: GeneratorMode },
    /// Critic with identity output, Lipschitz-constrained by clipping its
    /// parameters into `[-clip, clip]` after every update.
    Wasserstein { clip: f64 },
}

impl Default for LossFamily {
    fn default() -> Self {
        LossFamily::Vanilla { mode: GeneratorMode::Saturating }
    }
}

impl LossFamily {
    pub const DEFAULT_CLIP: f64 = 0.01;

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossFamily::Wasserstein { clip } if !(clip > 0.0 && clip.is_finite()) => {
                Err(Error::Config(format!("critic clip value must be positive, got {clip}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossFamily::Vanilla { .. } => "vanilla",
            LossFamily::Wasserstein { .. } => "wasserstein",
        }
    }

    pub fn is_wasserstein(&self) -> bool {
        matches!(self, LossFamily::Wasserstein { .. })
    }
}

/// Loss of a single player evaluated on one batch of outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub value: f64,
    pub seeds: Vec<f64>,
}

/// Loss evaluated on a real batch and a fake batch.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLossReport {
    pub value: f64,
    pub real_seeds: Vec<f64>,
    pub fake_seeds: Vec<f64>,
}

fn check_open_unit(name: &str, d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::Contract(format!("{name} is empty")));
    }
    if let Some(i) = d.iter().position(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(Error::Contract(format!(
            "{name}[{i}] = {} is not strictly inside (0, 1)",
            d[i]
        )));
    }
    Ok(())
}

fn check_finite(name: &str, f: &[f64]) -> Result<()> {
    if f.is_empty() {
        return Err(Error::Contract(format!("{name} is empty")));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("{name} contains a non-finite score")));
    }
    Ok(())
}

fn check_lengths(w: &WeightVector, n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::Contract(format!("{} weights for {n} samples", w.len())));
    }
    Ok(())
}

/// `(1/m) sum log d_real + (1/m) sum log(1 - d_fake)`, to be maximized.
pub fn disc_loss_vanilla(d_real: &[f64], d_fake: &[f64]) -> Result<PairLossReport> {
    check_open_unit("d_real", d_real)?;
    check_open_unit("d_fake", d_fake)?;
    let (mr, mf) = (d_real.len() as f64, d_fake.len() as f64);
    let value = d_real.iter().map(|d| d.ln()).sum::<f64>() / mr
        + d_fake.iter().map(|d| (1.0 - d).ln()).sum::<f64>() / mf;
    Ok(PairLossReport {
        value,
        real_seeds: d_real.iter().map(|d| 1.0 / (mr * d)).collect(),
        fake_seeds: d_fake.iter().map(|d| -1.0 / (mf * (1.0 - d))).collect(),
    })
}

/// Weighted generator loss for the vanilla family, to be minimized.
pub fn gen_loss_weighted_vanilla(d_fake: &[f64], w: &WeightVector, mode: GeneratorMode) -> Result<LossReport> {
    check_lengths(w, d_fake.len())?;
    check_open_unit("d_fake", d_fake)?;
    let w = w.values();
    let report = match mode {
        GeneratorMode::Saturating => LossReport {
            value: w.iter().zip(d_fake).map(|(wi, d)| wi * (1.0 - d).ln()).sum(),
            seeds: w.iter().zip(d_fake).map(|(wi, d)| -wi / (1.0 - d)).collect(),
        },
        GeneratorMode::NonSaturating => LossReport {
            value: -w.iter().zip(d_fake).map(|(wi, d)| wi * d.ln()).sum::<f64>(),
            seeds: w.iter().zip(d_fake).map(|(wi, d)| -wi / d).collect(),
        },
    };
    Ok(report)
}

/// `mean(f_real) - mean(f_fake)`, to be maximized.
pub fn critic_loss_wasserstein(f_real: &[f64], f_fake: &[f64]) -> Result<PairLossReport> {
    check_finite("f_real", f_real)?;
    check_finite("f_fake", f_fake)?;
    let (mr, mf) = (f_real.len() as f64, f_fake.len() as f64);
    Ok(PairLossReport {
        value: f_real.iter().sum::<f64>() / mr - f_fake.iter().sum::<f64>() / mf,
        real_seeds: vec![1.0 / mr; f_real.len()],
        fake_seeds: vec![-1.0 / mf; f_fake.len()],
    })
}

/// `-sum w_i f_fake_i`, to be minimized.
pub fn gen_loss_weighted_wasserstein(f_fake: &[f64], w: &WeightVector) -> Result<LossReport> {
    check_lengths(w, f_fake.len())?;
    check_finite("f_fake", f_fake)?;
    let w = w.values();
    Ok(LossReport {
        value: -w.iter().zip(f_fake).map(|(wi, f)| wi * f).sum::<f64>(),
        seeds: w.iter().map(|wi| -wi).collect(),
    })
}

/// Maps unbounded critic scores into `(0, 1)` so the multiplicative weight
/// formula can be applied to them.
pub fn critic_probabilities(f: &[f64]) -> Vec<f64> {
    f.iter().map(|&v| sigmoid(v)).collect()
}
