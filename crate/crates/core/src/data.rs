//! Samplers for the real-data ring mixture and the generator's input noise.

use crate::batch::Batch;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Equal-weight mixture of isotropic Gaussians whose means sit on a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingMixtureSpec {
    pub component_count: usize,
    pub radius: f64,
    /// Each component has covariance `covariance_scale * I`.
    pub covariance_scale: f64,
}

impl Default for RingMixtureSpec {
    fn default() -> Self {
        Self {
            component_count: 8,
            radius: 3.0,
            covariance_scale: 1.0,
        }
    }
}

impl RingMixtureSpec {
    pub const DIM: usize = 2;

    pub fn validate(&self) -> Result<()> {
        if self.component_count == 0 {
            return Err(Error::Config("ring mixture needs at least one component".into()));
        }
        if !(self.radius.is_finite() && self.radius >= 0.0) {
            return Err(Error::Config(format!("invalid ring radius {}", self.radius)));
        }
        if !(self.covariance_scale.is_finite() && self.covariance_scale > 0.0) {
            return Err(Error::Config(format!(
                "covariance scale must be positive, got {}",
                self.covariance_scale
            )));
        }
        Ok(())
    }

    /// Mean of component `j`, at angle `2*pi*j/K`.
    pub fn component_mean(&self, j: usize) -> [f64; 2] {
        let angle = 2.0 * std::f64::consts::PI * j as f64 / self.component_count as f64;
        [self.radius * angle.cos(), self.radius * angle.sin()]
    }

    /// Draws `n` points: a uniform component index, then the Gaussian offset.
    pub fn sample(&self, rng: &mut RngStream, n: usize) -> Result<Batch> {
        self.sample_labeled(rng, n).map(|(b, _)| b)
    }

    /// Like [`sample`](Self::sample) but also returns the component of each row.
    pub fn sample_labeled(&self, rng: &mut RngStream, n: usize) -> Result<(Batch, Vec<usize>)> {
        self.validate()?;
        if n == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        let std = self.covariance_scale.sqrt();
        let mut data = Vec::with_capacity(n * Self::DIM);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let j = rng.index(self.component_count);
            let [mx, my] = self.component_mean(j);
            data.push(rng.normal(mx, std));
            data.push(rng.normal(my, std));
            labels.push(j);
        }
        Ok((Batch::new(n, Self::DIM, data)?, labels))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseFamily {
    StandardNormal,
    /// Uniform on `[-1, 1]^dim`.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseSpec {
    pub dim: usize,
    pub family: NoiseFamily,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            dim: 2,
            family: NoiseFamily::StandardNormal,
        }
    }
}

impl NoiseSpec {
    pub fn sample(&self, rng: &mut RngStream, m: usize) -> Result<Batch> {
        if self.dim == 0 {
            return Err(Error::Config("noise dimension must be positive".into()));
        }
        if m == 0 {
            return Err(Error::Config("noise batch size must be at least 1".into()));
        }
        let data = (0..m * self.dim)
            .map(|_| match self.family {
                NoiseFamily::StandardNormal => rng.standard_normal(),
                NoiseFamily::Uniform => rng.uniform(-1.0, 1.0),
            })
            .collect();
        Batch::new(m, self.dim, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_mean_on_positive_axis() {
        let spec = RingMixtureSpec::default();
        assert_eq!(spec.component_mean(0), [3.0, 0.0]);
        for j in 0..8 {
            let [x, y] = spec.component_mean(j);
            assert!((x.hypot(y) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rows_rejected() {
        let mut rng = RngStream::from_seed(1);
        assert!(matches!(RingMixtureSpec::default().sample(&mut rng, 0), Err(Error::Config(_))));
        assert!(matches!(NoiseSpec::default().sample(&mut rng, 0), Err(Error::Config(_))));
    }

    #[test]
    fn ring_statistics() {
        let spec = RingMixtureSpec::default();
        let n = 100_000;
        let (b, labels) = spec.sample_labeled(&mut RngStream::from_seed(5), n).unwrap();
        assert_eq!(b.rows(), n);
        let mx = b.column_values(0).iter().sum::<f64>() / n as f64;
        let my = b.column_values(1).iter().sum::<f64>() / n as f64;
        assert!(mx.abs() < 0.05 && my.abs() < 0.05, "mean ({mx}, {my})");
        let mut counts = [0usize; 8];
        labels.iter().for_each(|&j| counts[j] += 1);
        for c in counts {
            assert!((c as f64 / n as f64 - 0.125).abs() < 0.01);
        }
    }

    #[test]
    fn noise_statistics() {
        let spec = NoiseSpec::default();
        let m = 100_000;
        let b = spec.sample(&mut RngStream::from_seed(6), m).unwrap();
        for j in 0..2 {
            let col = b.column_values(j);
            let mean = col.iter().sum::<f64>() / m as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
            assert!(mean.abs() < 0.05);
            assert!((var - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn uniform_noise_in_box() {
        let spec = NoiseSpec { dim: 3, family: NoiseFamily::Uniform };
        let b = spec.sample(&mut RngStream::from_seed(7), 1000).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(b.as_slice().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn same_seed_same_batch() {
        let spec = NoiseSpec::default();
        let a = spec.sample(&mut RngStream::from_seed(8), 16).unwrap();
        let b = spec.sample(&mut RngStream::from_seed(8), 16).unwrap();
        assert_eq!(a, b);
    }
}
