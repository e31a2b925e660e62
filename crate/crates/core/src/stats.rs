//! Small statistics helpers for comparing runs across seeds.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and sample standard deviation (`n - 1` denominator; 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub n: usize,
    pub mean_diff: f64,
    pub t: f64,
    /// One-sided p-value for `mean_diff > 0`.
    pub p_value: f64,
}

/// One-sided paired t-test of `H1: mean(differences) > 0`.
///
/// Returns `None` for fewer than two pairs. Identical differences give
/// `t = ±inf` (or `p = 0.5` when all are zero).
pub fn paired_t_test(differences: &[f64]) -> Option<PairedTest> {
    let n = differences.len();
    if n < 2 {
        return None;
    }
    let (mean_diff, sd) = mean_std(differences);
    let se = sd / (n as f64).sqrt();
    let (t, p_value) = if se > 0.0 {
        let t = mean_diff / se;
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?;
        (t, 1.0 - dist.cdf(t))
    } else if mean_diff > 0.0 {
        (f64::INFINITY, 0.0)
    } else if mean_diff < 0.0 {
        (f64::NEG_INFINITY, 1.0)
    } else {
        (0.0, 0.5)
    };
    Some(PairedTest {
        n,
        mean_diff,
        t,
        p_value,
    })
}
