//! Slow reference computations used by the property checks.
//!
//! These deliberately avoid the optimized code paths they are compared
//! against: every sum is a plain double loop over all index pairs and every
//! weight is evaluated straight from its defining formula.

use crate::batch::Batch;
use crate::metrics::Estimator;
use crate::nn::Mlp;

/// MMD² by enumerating all `(i, j)` pairs of each kernel block.
pub fn naive_mmd2(x: &Batch, y: &Batch, sigma: f64, estimator: Estimator) -> f64 {
    let kernel = |a: &[f64], b: &[f64]| {
        let mut d2 = 0.0;
        for t in 0..a.len() {
            d2 += (a[t] - b[t]).powi(2);
        }
        (-d2 / (2.0 * sigma * sigma)).exp()
    };
    let block = |a: &Batch, b: &Batch, skip_diagonal: bool| {
        let mut total = 0.0;
        let mut count = 0.0;
        for i in 0..a.rows() {
            for j in 0..b.rows() {
                if skip_diagonal && i == j {
                    continue;
                }
                total += kernel(a.row(i), b.row(j));
                count += 1.0;
            }
        }
        total / count
    };
    let unbiased = estimator == Estimator::Unbiased;
    block(x, x, unbiased) + block(y, y, unbiased) - 2.0 * block(x, y, false)
}

/// Lower median of all pairwise distances, by full sort.
pub fn naive_median_distance(points: &[Vec<f64>]) -> f64 {
    let mut d = Vec::new();
    for i in 0..points.len() {
        for j in 0..i {
            let s: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            d.push(s.sqrt());
        }
    }
    d.sort_by(f64::total_cmp);
    d[(d.len() - 1) / 2]
}

/// Central finite differences of `sum_i coeffs[i] * out_i` with respect to
/// every parameter of a scalar-output network.
pub fn finite_difference_grad(mlp: &Mlp, batch: &Batch, coeffs: &[f64], h: f64) -> Vec<f64> {
    let objective = |net: &Mlp| -> f64 {
        let out = net.forward(batch).expect("forward pass");
        out.outputs.as_slice().iter().zip(coeffs).map(|(o, c)| o * c).sum()
    };
    let mut probe = mlp.clone();
    let base = mlp.params().to_vec();
    (0..base.len())
        .map(|p| {
            let mut plus = base.clone();
            plus[p] += h;
            probe.set_params(plus).expect("finite parameters");
            let up = objective(&probe);
            let mut minus = base.clone();
            minus[p] -= h;
            probe.set_params(minus).expect("finite parameters");
            let down = objective(&probe);
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Multiplicative weights straight from `eta^(1 - d_i) / sum_j eta^(1 - d_j)`.
pub fn direct_wegan_weights(d: &[f64], eta: f64) -> Vec<f64> {
    let raw: Vec<f64> = d.iter().map(|di| eta.powf(1.0 - di)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Full weighted objective `(1/m) sum log d_real + sum w_i log(1 - d_fake_i)`.
pub fn weighted_objective(d_real: &[f64], d_fake: &[f64], w: &[f64]) -> f64 {
    let real: f64 = d_real.iter().map(|d| d.ln()).sum::<f64>() / d_real.len() as f64;
    let mut fake = 0.0;
    for i in 0..d_fake.len() {
        fake += w[i] * (1.0 - d_fake[i]).ln();
    }
    real + fake
}
