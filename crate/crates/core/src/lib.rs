//! Weighted generator updates for GAN training.
//!
//! The generator step weights each fake sample by `eta^(1 - D(G(z)))`,
//! normalized over the batch, instead of weighting all samples equally. This
//! crate contains a small dense-network stack with exact gradients, the
//! weighting schemes (uniform, multiplicative, importance), vanilla and
//! Wasserstein losses, a trainer for the 8-Gaussian ring benchmark, MMD
//! evaluation, and an experiment harness that writes CSV traces.

pub mod batch;
pub mod data;
pub mod error;
pub mod harness;
pub mod losses;
pub mod metrics;
pub mod nn;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod trainer;
pub mod weighting;

pub use batch::Batch;
pub use error::{Error, Result};
pub use trainer::{train, MetricTrace, TrainConfig, TrainFailure, Trainer};
pub use weighting::{WeightScheme, WeightVector};
