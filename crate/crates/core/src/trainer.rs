//! Alternating adversarial training with weighted generator updates.
//!
//! One outer iteration runs `disc_steps` discriminator ascent steps, each on a
//! fresh real batch and a fresh noise batch, followed by a single generator
//! descent step on a fresh noise batch whose per-sample loss terms are
//! weighted by the configured [`WeightScheme`].
//!
//! Randomness is split into independent streams: parameter initialization,
//! real data, training noise, and per-epoch evaluation streams. The number of
//! draws depends only on the seed, batch size, `disc_steps` and iteration
//! count, never on the weighting scheme.

use thiserror::Error;

use crate::batch::Batch;
use crate::data::{NoiseSpec, RingMixtureSpec};
use crate::error::{Error, Result};
use crate::losses::{
    critic_loss_wasserstein, critic_probabilities, disc_loss_vanilla, gen_loss_weighted_vanilla,
    gen_loss_weighted_wasserstein, LossFamily,
};
use crate::metrics::{mmd2, MmdConfig};
use crate::nn::{adam_step, Activation, AdamConfig, AdamState, Mlp, ParamGrad};
use crate::rng::{RngStream, StreamRole};
use crate::weighting::{WeightScheme, WeightVector};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Samples per batch (`m`).
    pub batch_size: usize,
    /// Discriminator steps per generator step (`k`).
    pub disc_steps: usize,
    /// Total generator iterations.
    pub iterations: usize,
    /// Generator iterations per metric record.
    pub epoch_len: usize,
    pub loss: LossFamily,
    pub scheme: WeightScheme,
    pub gen_adam: AdamConfig,
    pub disc_adam: AdamConfig,
    pub gen_hidden: Vec<usize>,
    pub disc_hidden: Vec<usize>,
    pub noise: NoiseSpec,
    pub data: RingMixtureSpec,
    pub seed: u64,
    /// Real and generated samples drawn for each MMD evaluation.
    pub eval_samples: usize,
    pub mmd: MmdConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            disc_steps: 1,
            iterations: 3000,
            epoch_len: 100,
            loss: LossFamily::default(),
            scheme: WeightScheme::Uniform,
            gen_adam: AdamConfig::default(),
            disc_adam: AdamConfig::default(),
            gen_hidden: vec![32, 32],
            disc_hidden: vec![32, 32],
            noise: NoiseSpec::default(),
            data: RingMixtureSpec::default(),
            seed: 0,
            eval_samples: 2048,
            mmd: MmdConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.disc_steps == 0 {
            return Err(Error::Config("discriminator steps must be at least 1".into()));
        }
        if self.epoch_len == 0 {
            return Err(Error::Config("epoch length must be at least 1".into()));
        }
        if self.eval_samples < 2 {
            return Err(Error::Config("evaluation needs at least 2 samples".into()));
        }
        if self.noise.dim == 0 {
            return Err(Error::Config("noise dimension must be positive".into()));
        }
        if self.gen_hidden.iter().chain(&self.disc_hidden).any(|&h| h == 0) {
            return Err(Error::Config("hidden layer widths must be positive".into()));
        }
        self.scheme.validate()?;
        self.loss.validate()?;
        self.data.validate()?;
        self.gen_adam.validate()?;
        self.disc_adam.validate()?;
        if self.loss.is_wasserstein() && matches!(self.scheme, WeightScheme::Iwgan { .. }) {
            return Err(Error::Config(
                "IWGAN is not applicable to the wasserstein loss family".into(),
            ));
        }
        Ok(())
    }

    pub fn generator_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.noise.dim];
        dims.extend(&self.gen_hidden);
        dims.push(RingMixtureSpec::DIM);
        dims
    }

    pub fn discriminator_dims(&self) -> Vec<usize> {
        let mut dims = vec![RingMixtureSpec::DIM];
        dims.extend(&self.disc_hidden);
        dims.push(1);
        dims
    }

    fn discriminator_output(&self) -> Activation {
        if self.loss.is_wasserstein() {
            Activation::Identity
        } else {
            Activation::Sigmoid
        }
    }
}

/// One metric record, written every `epoch_len` generator iterations.
///
/// Losses and discriminator means are averaged over the epoch's steps;
/// `mean_d_real`/`mean_d_fake` come from the discriminator steps (critic
/// scores for the Wasserstein family).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub gen_iter: usize,
    pub mmd: f64,
    pub weight_var: f64,
    pub mean_d_real: f64,
    pub mean_d_fake: f64,
    pub disc_loss: f64,
    pub gen_loss: f64,
}

impl EpochRecord {
    fn values(&self) -> [f64; 6] {
        [
            self.mmd,
            self.weight_var,
            self.mean_d_real,
            self.mean_d_fake,
            self.disc_loss,
            self.gen_loss,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    fn bitwise_eq(&self, other: &Self) -> bool {
        self.epoch == other.epoch
            && self.gen_iter == other.gen_iter
            && self
                .values()
                .iter()
                .zip(other.values())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricTrace {
    pub records: Vec<EpochRecord>,
}

impl MetricTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Equality of every field down to the bit pattern of each float.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| a.bitwise_eq(b))
    }

    pub fn mmd_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mmd).collect()
    }
}

/// A run that stopped early; `trace` holds the records written before the error.
#[derive(Debug, Clone, Error)]
#[error("training failed at generator iteration {gen_iter}: {error}")]
pub struct TrainFailure {
    pub trace: MetricTrace,
    pub error: Error,
    pub gen_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscStepStats {
    pub loss: f64,
    pub mean_d_real: f64,
    pub mean_d_fake: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenStepStats {
    pub loss: f64,
    pub weight_variance: f64,
    pub weights: WeightVector,
}

/// Generator gradient for one noise batch against a fixed discriminator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorGradient {
    pub grad: ParamGrad,
    pub weights: WeightVector,
    pub loss: f64,
    /// Discriminator outputs on the generated samples (clamped probabilities,
    /// or raw critic scores).
    pub d_fake: Vec<f64>,
}

/// Weighted generator gradient: the loss seeds on `D(G(z))` are pulled back
/// through the discriminator to the generated samples and then through the
/// generator to its parameters.
pub fn generator_gradient(
    generator: &Mlp,
    discriminator: &Mlp,
    noise: &Batch,
    scheme: &WeightScheme,
    loss: &LossFamily,
) -> Result<GeneratorGradient> {
    let g_pass = generator.forward(noise)?;
    let d_pass = discriminator.forward(&g_pass.outputs)?;
    let scores = d_pass.outputs.as_slice().to_vec();
    let (weights, report) = match *loss {
        LossFamily::Vanilla { mode } => {
            let weights = match scheme {
                // Importance weights see the unclamped probability, so a
                // saturated discriminator yields an infinite weight.
                WeightScheme::Iwgan { .. } => scheme.weights(&d_pass.raw_outputs(Activation::Sigmoid))?,
                _ => scheme.weights(&scores)?,
            };
            let report = gen_loss_weighted_vanilla(&scores, &weights, mode)?;
            (weights, report)
        }
        LossFamily::Wasserstein { .. } => {
            let weights = scheme.weights(&critic_probabilities(&scores))?;
            let report = gen_loss_weighted_wasserstein(&scores, &weights)?;
            (weights, report)
        }
    };
    let (_, sample_grads) = discriminator.backward_full(&d_pass.cache, &Batch::column(report.seeds))?;
    let (grad, _) = generator.backward_full(&g_pass.cache, &sample_grads)?;
    Ok(GeneratorGradient {
        grad,
        weights,
        loss: report.value,
        d_fake: scores,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub struct Trainer {
    config: TrainConfig,
    generator: Mlp,
    discriminator: Mlp,
    gen_opt: AdamState,
    disc_opt: AdamState,
    real_rng: RngStream,
    noise_rng: RngStream,
    gen_iter: usize,
    real_batches: u64,
    noise_batches: u64,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let mut init = RngStream::for_role(config.seed, StreamRole::Init);
        let generator = Mlp::init(
            &config.generator_dims(),
            Activation::Relu,
            Activation::Identity,
            &mut init,
        )?;
        let discriminator = Mlp::init(
            &config.discriminator_dims(),
            Activation::Relu,
            config.discriminator_output(),
            &mut init,
        )?;
        Ok(Self {
            gen_opt: AdamState::new(generator.param_count()),
            disc_opt: AdamState::new(discriminator.param_count()),
            real_rng: RngStream::for_role(config.seed, StreamRole::RealData),
            noise_rng: RngStream::for_role(config.seed, StreamRole::Noise),
            generator,
            discriminator,
            config,
            gen_iter: 0,
            real_batches: 0,
            noise_batches: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn generator(&self) -> &Mlp {
        &self.generator
    }

    pub fn discriminator(&self) -> &Mlp {
        &self.discriminator
    }

    /// Swaps in a different discriminator of the same shape and resets its
    /// optimizer state.
    pub fn set_discriminator(&mut self, discriminator: Mlp) -> Result<()> {
        if discriminator.layer_dims() != self.discriminator.layer_dims() {
            return Err(Error::Shape("replacement discriminator has a different shape".into()));
        }
        self.disc_opt = AdamState::new(discriminator.param_count());
        self.discriminator = discriminator;
        Ok(())
    }

    pub fn gen_iter(&self) -> usize {
        self.gen_iter
    }

    /// (real batches, noise batches) drawn so far.
    pub fn batches_drawn(&self) -> (u64, u64) {
        (self.real_batches, self.noise_batches)
    }

    /// Raw draws from the (real-data, noise) streams so far.
    pub fn stream_draws(&self) -> (u64, u64) {
        (self.real_rng.draws(), self.noise_rng.draws())
    }

    fn draw_noise(&mut self) -> Result<Batch> {
        self.noise_batches += 1;
        self.config.noise.sample(&mut self.noise_rng, self.config.batch_size)
    }

    /// One ascent step of the discriminator (or critic) on fresh batches.
    pub fn discriminator_step(&mut self) -> Result<DiscStepStats> {
        self.real_batches += 1;
        let real = self.config.data.sample(&mut self.real_rng, self.config.batch_size)?;
        let z = self.draw_noise()?;
        let fake = self.generator.forward(&z)?.outputs;
        let real_pass = self.discriminator.forward(&real)?;
        let fake_pass = self.discriminator.forward(&fake)?;
        let d_real = real_pass.outputs.as_slice();
        let d_fake = fake_pass.outputs.as_slice();
        let report = match self.config.loss {
            LossFamily::Vanilla { .. } => disc_loss_vanilla(d_real, d_fake)?,
            LossFamily::Wasserstein { .. } => critic_loss_wasserstein(d_real, d_fake)?,
        };
        let mut grad = self.discriminator.backward(&real_pass.cache, &report.real_seeds)?;
        grad.add_assign(&self.discriminator.backward(&fake_pass.cache, &report.fake_seeds)?)?;
        grad.scale(-1.0);
        adam_step(&mut self.discriminator, &grad, &mut self.disc_opt, &self.config.disc_adam)?;
        if let LossFamily::Wasserstein { clip } = self.config.loss {
            self.discriminator.clip_params(clip)?;
        }
        Ok(DiscStepStats {
            loss: report.value,
            mean_d_real: mean(d_real),
            mean_d_fake: mean(d_fake),
        })
    }

    /// One weighted descent step of the generator on a fresh noise batch.
    pub fn generator_step(&mut self) -> Result<GenStepStats> {
        let z = self.draw_noise()?;
        let g = generator_gradient(
            &self.generator,
            &self.discriminator,
            &z,
            &self.config.scheme,
            &self.config.loss,
        )?;
        adam_step(&mut self.generator, &g.grad, &mut self.gen_opt, &self.config.gen_adam)?;
        self.gen_iter += 1;
        Ok(GenStepStats {
            loss: g.loss,
            weight_variance: g.weights.variance(),
            weights: g.weights,
        })
    }

    /// MMD between fresh real and generated samples drawn from the evaluation
    /// streams of `epoch`; training streams are not touched.
    pub fn evaluate(&self, epoch: usize) -> Result<f64> {
        let n = self.config.eval_samples;
        let mut real_rng = RngStream::child(self.config.seed, "eval-real", epoch as u64);
        let mut noise_rng = RngStream::child(self.config.seed, "eval-noise", epoch as u64);
        let real = self.config.data.sample(&mut real_rng, n)?;
        let fake = self.generator.forward(&self.config.noise.sample(&mut noise_rng, n)?)?.outputs;
        mmd2(&real, &fake, &self.config.mmd)
    }

    /// Runs the remaining iterations, recording one [`EpochRecord`] per epoch.
    pub fn run(&mut self) -> std::result::Result<MetricTrace, TrainFailure> {
        let mut trace = MetricTrace::default();
        match self.run_into(&mut trace) {
            Ok(()) => Ok(trace),
            Err(error) => Err(TrainFailure {
                trace,
                error,
                gen_iter: self.gen_iter,
            }),
        }
    }

    fn run_into(&mut self, trace: &mut MetricTrace) -> Result<()> {
        let k = self.config.disc_steps;
        let epoch_len = self.config.epoch_len;
        let mut acc = EpochAccumulator::default();
        while self.gen_iter < self.config.iterations {
            for _ in 0..k {
                acc.disc(self.discriminator_step()?);
            }
            acc.gen(&self.generator_step()?);
            if self.gen_iter % epoch_len == 0 {
                let epoch = self.gen_iter / epoch_len;
                let record = acc.finish(epoch, self.gen_iter, self.evaluate(epoch)?);
                if !record.is_finite() {
                    return Err(Error::Numeric(format!("non-finite metrics at epoch {epoch}")));
                }
                trace.records.push(record);
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct EpochAccumulator {
    disc_loss: Vec<f64>,
    d_real: Vec<f64>,
    d_fake: Vec<f64>,
    gen_loss: Vec<f64>,
    weight_var: Vec<f64>,
}

impl EpochAccumulator {
    fn disc(&mut self, s: DiscStepStats) {
        self.disc_loss.push(s.loss);
        self.d_real.push(s.mean_d_real);
        self.d_fake.push(s.mean_d_fake);
    }

    fn gen(&mut self, s: &GenStepStats) {
        self.gen_loss.push(s.loss);
        self.weight_var.push(s.weight_variance);
    }

    fn finish(&mut self, epoch: usize, gen_iter: usize, mmd: f64) -> EpochRecord {
        let taken = std::mem::take(self);
        EpochRecord {
            epoch,
            gen_iter,
            mmd,
            weight_var: mean(&taken.weight_var),
            mean_d_real: mean(&taken.d_real),
            mean_d_fake: mean(&taken.d_fake),
            disc_loss: mean(&taken.disc_loss),
            gen_loss: mean(&taken.gen_loss),
        }
    }
}

/// Trains from scratch under `config`.
pub fn train(config: &TrainConfig) -> std::result::Result<MetricTrace, TrainFailure> {
    let mut trainer = Trainer::new(config.clone()).map_err(|error| TrainFailure {
        trace: MetricTrace::default(),
        error,
        gen_iter: 0,
    })?;
    trainer.run()
}
