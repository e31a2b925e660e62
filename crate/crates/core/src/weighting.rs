//! Per-sample weights for the generator update.
//!
//! Each fake sample in a generator batch gets a weight on the probability
//! simplex. The multiplicative scheme gives sample `i` the unnormalized weight
//! `eta^(1 - D(G(z_i)))`, so samples the discriminator rates as more real keep
//! more of their weight. Weights are recomputed from the current
//! discriminator outputs on every generator step and never accumulated.

use crate::error::{Error, Result};

/// Tolerance on `sum(w) == 1`.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Wraps raw values without normalizing; use [`check_simplex`](Self::check_simplex)
    /// to validate.
    pub fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Population variance of the entries; exactly 0 when all entries are equal.
    pub fn variance(&self) -> f64 {
        weight_variance(&self.0)
    }

    pub fn check_simplex(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Contract("empty weight vector".into()));
        }
        if let Some(i) = self.0.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Contract(format!("weight {i} is {}", self.0[i])));
        }
        let sum: f64 = self.0.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Contract(format!("weights sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// How generator samples are weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    Uniform,
    /// Multiplicative weights `eta^(1 - d)`, `eta` in `(0, 1]`.
    Wegan { eta: f64 },
    /// Importance weights `d / (1 - d)`, optionally capped before normalizing.
    Iwgan { clamp: Option<f64> },
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Uniform => Ok(()),
            WeightScheme::Wegan { eta } => check_eta(eta),
            WeightScheme::Iwgan { clamp: Some(c) } if !(c > 0.0 && c.is_finite()) => {
                Err(Error::Config(format!("importance-weight clamp must be positive, got {c}")))
            }
            WeightScheme::Iwgan { .. } => Ok(()),
        }
    }

    /// Short algorithm name used in file names and CSV rows.
    pub fn algorithm(&self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::Wegan { .. } => "wegan",
            WeightScheme::Iwgan { .. } => "iwgan",
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match *self {
            WeightScheme::Wegan { eta } => Some(eta),
            _ => None,
        }
    }

    /// Weights for discriminator outputs `d` (probabilities in `[0, 1]`).
    pub fn weights(&self, d: &[f64]) -> Result<WeightVector> {
        match *self {
            WeightScheme::Uniform => uniform_weights(d.len()),
            WeightScheme::Wegan { eta } => wegan_weights(d, eta),
            WeightScheme::Iwgan { clamp } => iwgan_weights(d, clamp),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("eta must lie in (0, 1], got {eta}")))
    }
}

fn check_probabilities(d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(Error::Contract("need at least one discriminator output".into()));
    }
    if let Some(i) = d.iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Contract(format!(
            "discriminator output {i} is {}, outside [0, 1]",
            d[i]
        )));
    }
    Ok(())
}

pub fn uniform_weights(m: usize) -> Result<WeightVector> {
    if m == 0 {
        return Err(Error::Contract("cannot weight an empty batch".into()));
    }
    Ok(WeightVector(vec![1.0 / m as f64; m]))
}

/// `w_i = eta^(1 - d_i) / sum_j eta^(1 - d_j)`.
///
/// Evaluated in log space with the largest exponent shifted to zero, so equal
/// `d` values give exactly `1/m` and `eta = 1` reproduces [`uniform_weights`]
/// bit for bit.
pub fn wegan_weights(d: &[f64], eta: f64) -> Result<WeightVector> {
    check_eta(eta)?;
    check_probabilities(d)?;
    let log_eta = eta.ln();
    let exps: Vec<f64> = d.iter().map(|&di| (1.0 - di) * log_eta).collect();
    let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    normalize(exps.iter().map(|e| (e - top).exp()).collect())
}

/// `w_i ∝ d_i / (1 - d_i)`. Without a clamp, `d_i = 1` makes the weight
/// infinite and is reported as [`Error::DivergentWeight`].
pub fn iwgan_weights(d: &[f64], clamp: Option<f64>) -> Result<WeightVector> {
    check_probabilities(d)?;
    let mut raw = Vec::with_capacity(d.len());
    for (i, &di) in d.iter().enumerate() {
        let ratio = di / (1.0 - di);
        let w = match clamp {
            Some(c) => ratio.min(c),
            None if !ratio.is_finite() => return Err(Error::DivergentWeight { index: i, d: di }),
            None => ratio,
        };
        raw.push(w);
    }
    normalize(raw)
}

fn normalize(raw: Vec<f64>) -> Result<WeightVector> {
    let total: f64 = raw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numeric(format!("unnormalized weights sum to {total}")));
    }
    Ok(WeightVector(raw.into_iter().map(|w| w / total).collect()))
}

/// Population variance, computed on values shifted by the first entry so that
/// a constant vector yields exactly zero.
pub fn weight_variance(w: &[f64]) -> f64 {
    let Some(&first) = w.first() else {
        return 0.0;
    };
    let n = w.len() as f64;
    let mean_shift = w.iter().map(|x| x - first).sum::<f64>() / n;
    w.iter().map(|x| (x - first - mean_shift).powi(2)).sum::<f64>() / n
}

/// Generator-side gap between the equally weighted and the multiplicatively
/// weighted loss for fixed discriminator outputs:
/// `(1/m) sum log(1 - d_i) - sum w_i log(1 - d_i)`.
///
/// The real-sample term is the same under both weightings and cancels. The gap
/// is nonnegative for every `d` and `eta`, up to rounding.
pub fn loss_margin(d: &[f64], eta: f64) -> Result<f64> {
    if let Some(i) = d.iter().position(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(Error::Contract(format!(
            "discriminator output {i} is {}; clamp into (0, 1) first",
            d[i]
        )));
    }
    let w = wegan_weights(d, eta)?;
    Ok(margin_with_weights(d, w.values()))
}

pub(crate) fn margin_with_weights(d: &[f64], w: &[f64]) -> f64 {
    let logs: Vec<f64> = d.iter().map(|di| (1.0 - di).ln()).collect();
    // Same summation form as the weighted side, so uniform weights give exactly 0.
    let u = 1.0 / d.len() as f64;
    let uniform: f64 = logs.iter().map(|li| u * li).sum();
    let weighted: f64 = w.iter().zip(&logs).map(|(wi, li)| wi * li).sum();
    uniform - weighted
}
