//! Maximum mean discrepancy with a Gaussian RBF kernel, and the
//! discriminator-faithfulness check.

use crate::batch::Batch;
use crate::error::{Error, Result};

/// Smallest bandwidth the median heuristic returns.
pub const BANDWIDTH_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Median pairwise distance of the pooled samples.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// V-statistic; always nonnegative.
    Biased,
    /// U-statistic excluding the diagonal; may be slightly negative.
    Unbiased,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdConfig {
    pub bandwidth: Bandwidth,
    pub estimator: Estimator,
}

impl Default for MmdConfig {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::Median,
            estimator: Estimator::Unbiased,
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian RBF kernel `exp(-|x - y|^2 / (2 sigma^2))`.
pub fn rbf(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    (-sq_dist(x, y) / (2.0 * sigma * sigma)).exp()
}

/// Lower median of the pairwise Euclidean distances of `X ∪ Y`, floored at
/// [`BANDWIDTH_FLOOR`].
pub fn median_heuristic(x: &Batch, y: &Batch) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", x.dim(), y.dim())));
    }
    let pooled: Vec<&[f64]> = x.iter_rows().chain(y.iter_rows()).collect();
    let n = pooled.len();
    if n < 2 {
        return Err(Error::Contract("median heuristic needs at least 2 points".into()));
    }
    let mut d2 = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d2.push(sq_dist(pooled[i], pooled[j]));
        }
    }
    let k = (d2.len() - 1) / 2;
    let (_, median, _) = d2.select_nth_unstable_by(k, f64::total_cmp);
    Ok(median.sqrt().max(BANDWIDTH_FLOOR))
}

/// Sum of `k(a_i, a_j)` over `i < j`.
fn upper_sum(a: &Batch, sigma: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..a.rows() {
        let ai = a.row(i);
        for j in i + 1..a.rows() {
            total += rbf(ai, a.row(j), sigma);
        }
    }
    total
}

fn cross_sum(a: &Batch, b: &Batch, sigma: f64) -> f64 {
    let mut total = 0.0;
    for ai in a.iter_rows() {
        for bj in b.iter_rows() {
            total += rbf(ai, bj, sigma);
        }
    }
    total
}

/// Squared MMD between the empirical distributions of `x` and `y`.
///
/// Kernel sums run in a fixed sequential order, so results are reproducible.
pub fn mmd2(x: &Batch, y: &Batch, config: &MmdConfig) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Contract("MMD needs non-empty sample sets".into()));
    }
    if x.dim() != y.dim() {
        return Err(Error::Shape(format!("dimensions {} and {} differ", x.dim(), y.dim())));
    }
    let sigma = match config.bandwidth {
        Bandwidth::Median => median_heuristic(x, y)?,
        Bandwidth::Fixed(s) if s > 0.0 && s.is_finite() => s,
        Bandwidth::Fixed(s) => return Err(Error::Config(format!("bandwidth must be positive, got {s}"))),
    };
    let (n, m) = (x.rows() as f64, y.rows() as f64);
    let kxy = cross_sum(x, y, sigma) / (n * m);
    let value = match config.estimator {
        Estimator::Biased => {
            let kxx = (n + 2.0 * upper_sum(x, sigma)) / (n * n);
            let kyy = (m + 2.0 * upper_sum(y, sigma)) / (m * m);
            kxx + kyy - 2.0 * kxy
        }
        Estimator::Unbiased => {
            if x.rows() < 2 || y.rows() < 2 {
                return Err(Error::Contract("unbiased MMD needs at least 2 rows per set".into()));
            }
            let kxx = 2.0 * upper_sum(x, sigma) / (n * (n - 1.0));
            let kyy = 2.0 * upper_sum(y, sigma) / (m * (m - 1.0));
            kxx + kyy - 2.0 * kxy
        }
    };
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaithfulnessReport {
    pub mean_real: f64,
    pub mean_fake: f64,
    /// `mean_real > 0.5 && mean_fake < 0.5`.
    pub faithful: bool,
}

pub fn faithfulness(d_real: &[f64], d_fake: &[f64]) -> Result<FaithfulnessReport> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(Error::Contract("faithfulness needs non-empty inputs".into()));
    }
    if d_real.iter().chain(d_fake).any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Contract("discriminator outputs must lie in [0, 1]".into()));
    }
    let mean_real = d_real.iter().sum::<f64>() / d_real.len() as f64;
    let mean_fake = d_fake.iter().sum::<f64>() / d_fake.len() as f64;
    Ok(FaithfulnessReport {
        mean_real,
        mean_fake,
        faithful: mean_real > 0.5 && mean_fake < 0.5,
    })
}
