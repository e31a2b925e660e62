//! Dense multilayer perceptrons with exact reverse-mode gradients.
//!
//! Parameters live in one flat vector: for each layer in order, the weight
//! matrix (row-major, `fan_out x fan_in`) followed by the bias vector.
//! Hidden layers use a rectifier; the output layer is sigmoid or identity.
//!
//! Gradients are seeded per sample: [`Mlp::backward`] returns the gradient of
//! `sum_i c_i * out_i` for caller-supplied coefficients `c_i`, which is how
//! losses over batches are differentiated without a general graph.

use crate::batch::Batch;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Sigmoid outputs are clamped into `[SIGMOID_FLOOR, 1 - SIGMOID_FLOOR]`.
pub const SIGMOID_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(SIGMOID_FLOOR, 1.0 - SIGMOID_FLOOR)
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => clamp_probability(sigmoid(z)),
            Activation::Identity => z,
        }
    }

    /// Derivative of `apply` at `z`, including the sigmoid clamp.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                if !(SIGMOID_FLOOR..=1.0 - SIGMOID_FLOOR).contains(&s) {
                    0.0
                } else {
                    s * (1.0 - s)
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Number of parameters of a dense network with the given layer widths.
pub fn param_count(layer_dims: &[usize]) -> usize {
    layer_dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layer_dims: Vec<usize>,
    hidden: Activation,
    output: Activation,
    params: Vec<f64>,
}

/// Gradient with the same layout as [`Mlp`] parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrad(Vec<f64>);

impl ParamGrad {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|g| g.is_finite())
    }

    pub fn scale(&mut self, factor: f64) {
        self.0.iter_mut().for_each(|g| *g *= factor);
    }

    pub fn add_assign(&mut self, other: &ParamGrad) -> Result<()> {
        if other.len() != self.len() {
            return Err(Error::Shape("gradient lengths differ".into()));
        }
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a += b);
        Ok(())
    }
}

/// Everything a backward pass needs from the forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    rows: usize,
    params_digest: u64,
    /// Input to each layer; `inputs[0]` is the batch itself.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Pre-activations of every hidden unit for every sample.
    pub fn hidden_preactivations(&self) -> impl Iterator<Item = f64> + '_ {
        let hidden = self.pre.len().saturating_sub(1);
        self.pre[..hidden].iter().flatten().copied()
    }

    /// Output-layer pre-activations (logits for a sigmoid head).
    pub fn logits(&self) -> &[f64] {
        self.pre.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub outputs: Batch,
    pub cache: ForwardCache,
}

impl ForwardPass {
    /// Output activations without the sigmoid clamp.
    pub fn raw_outputs(&self, output: Activation) -> Vec<f64> {
        self.cache
            .logits()
            .iter()
            .map(|&z| match output {
                Activation::Sigmoid => sigmoid(z),
                other => other.apply(z),
            })
            .collect()
    }
}

fn digest(params: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in params {
        h ^= p.to_bits();
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn validate_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(Error::Config(format!(
            "an MLP needs at least 2 layer dims, got {}",
            layer_dims.len()
        )));
    }
    if layer_dims.iter().any(|&d| d == 0) {
        return Err(Error::Config("layer dims must be positive".into()));
    }
    Ok(())
}

impl Mlp {
    /// He-normal weights for rectifier layers, Xavier-normal for the output
    /// layer, zero biases. Draws weights layer by layer in parameter order.
    pub fn init(
        layer_dims: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut RngStream,
    ) -> Result<Self> {
        validate_dims(layer_dims)?;
        let n_layers = layer_dims.len() - 1;
        let mut params = Vec::with_capacity(param_count(layer_dims));
        for (l, w) in layer_dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let std = if l + 1 == n_layers {
                (2.0 / (fan_in + fan_out) as f64).sqrt()
            } else {
                (2.0 / fan_in as f64).sqrt()
            };
            for _ in 0..fan_in * fan_out {
                params.push(rng.normal(0.0, std));
            }
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            hidden,
            output,
            params,
        })
    }

    pub fn from_params(
        layer_dims: &[usize],
        hidden: Activation,
        output: Activation,
        params: Vec<f64>,
    ) -> Result<Self> {
        validate_dims(layer_dims)?;
        let mut mlp = Self {
            layer_dims: layer_dims.to_vec(),
            hidden,
            output,
            params: vec![0.0; param_count(layer_dims)],
        };
        mlp.set_params(params)?;
        Ok(mlp)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn output_activation(&self) -> Activation {
        self.output
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn set_params(&mut self, params: Vec<f64>) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numeric("non-finite parameter".into()));
        }
        self.params = params;
        Ok(())
    }

    fn layer_activation(&self, l: usize) -> Activation {
        if l + 2 == self.layer_dims.len() {
            self.output
        } else {
            self.hidden
        }
    }

    /// Offsets of (weights, biases) of layer `l` in the flat parameter vector.
    fn layer_offsets(&self, l: usize) -> (usize, usize) {
        let start = param_count(&self.layer_dims[..=l]);
        let (fan_in, fan_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
        (start, start + fan_in * fan_out)
    }

    pub fn forward(&self, batch: &Batch) -> Result<ForwardPass> {
        if batch.dim() != self.input_dim() {
            return Err(Error::Shape(format!(
                "batch dimension {} does not match network input {}",
                batch.dim(),
                self.input_dim()
            )));
        }
        let rows = batch.rows();
        let n_layers = self.layer_dims.len() - 1;
        let mut inputs = Vec::with_capacity(n_layers);
        let mut pre = Vec::with_capacity(n_layers);
        let mut current = batch.as_slice().to_vec();
        for l in 0..n_layers {
            let (fan_in, fan_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let weights = &self.params[w_off..b_off];
            let biases = &self.params[b_off..b_off + fan_out];
            let mut z = vec![0.0; rows * fan_out];
            for (x, zr) in current.chunks_exact(fan_in).zip(z.chunks_exact_mut(fan_out)) {
                for ((zo, wrow), b) in zr.iter_mut().zip(weights.chunks_exact(fan_in)).zip(biases) {
                    *zo = b + wrow.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
                }
            }
            let act = self.layer_activation(l);
            let next: Vec<f64> = z.iter().map(|&v| act.apply(v)).collect();
            inputs.push(std::mem::replace(&mut current, next));
            pre.push(z);
        }
        if current.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite network output".into()));
        }
        Ok(ForwardPass {
            outputs: Batch::new(rows, self.output_dim(), current)?,
            cache: ForwardCache {
                rows,
                params_digest: digest(&self.params),
                inputs,
                pre,
            },
        })
    }

    /// Gradient of `sum_i output_grads[i] * out_i` for a scalar-output network.
    pub fn backward(&self, cache: &ForwardCache, output_grads: &[f64]) -> Result<ParamGrad> {
        if self.output_dim() != 1 {
            return Err(Error::Shape(
                "per-sample scalar seeds need a scalar-output network".into(),
            ));
        }
        let seeds = Batch::column(output_grads.to_vec());
        self.backward_full(cache, &seeds).map(|(g, _)| g)
    }

    /// Gradient of `sum_{i,j} seeds[i][j] * out[i][j]` with respect to the
    /// parameters and to the network inputs.
    pub fn backward_full(&self, cache: &ForwardCache, seeds: &Batch) -> Result<(ParamGrad, Batch)> {
        if cache.params_digest != digest(&self.params) || cache.inputs.len() + 1 != self.layer_dims.len()
        {
            return Err(Error::Contract(
                "forward cache does not belong to this network state".into(),
            ));
        }
        if seeds.rows() != cache.rows || seeds.dim() != self.output_dim() {
            return Err(Error::Contract(format!(
                "expected {} x {} output seeds, got {} x {}",
                cache.rows,
                self.output_dim(),
                seeds.rows(),
                seeds.dim()
            )));
        }
        let rows = cache.rows;
        let mut grad = vec![0.0; self.params.len()];
        let out_act = self.output;
        let mut delta: Vec<f64> = seeds
            .as_slice()
            .iter()
            .zip(cache.pre.last().unwrap())
            .map(|(s, &z)| s * out_act.derivative(z))
            .collect();
        for l in (0..self.layer_dims.len() - 1).rev() {
            let (fan_in, fan_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let (w_off, b_off) = self.layer_offsets(l);
            let weights = &self.params[w_off..b_off];
            let input = &cache.inputs[l];
            {
                let (gw, gb) = grad[w_off..b_off + fan_out].split_at_mut(fan_in * fan_out);
                for (d, x) in delta.chunks_exact(fan_out).zip(input.chunks_exact(fan_in)) {
                    for ((&dj, gwrow), gbj) in d.iter().zip(gw.chunks_exact_mut(fan_in)).zip(gb.iter_mut()) {
                        if dj == 0.0 {
                            continue;
                        }
                        *gbj += dj;
                        gwrow.iter_mut().zip(x).for_each(|(g, xi)| *g += dj * xi);
                    }
                }
            }
            let mut prev = vec![0.0; rows * fan_in];
            for (d, p) in delta.chunks_exact(fan_out).zip(prev.chunks_exact_mut(fan_in)) {
                for (&dj, wrow) in d.iter().zip(weights.chunks_exact(fan_in)) {
                    if dj == 0.0 {
                        continue;
                    }
                    p.iter_mut().zip(wrow).for_each(|(pi, w)| *pi += dj * w);
                }
            }
            if l > 0 {
                let act = self.layer_activation(l - 1);
                prev.iter_mut()
                    .zip(&cache.pre[l - 1])
                    .for_each(|(p, &z)| *p *= act.derivative(z));
            }
            delta = prev;
        }
        let grad = ParamGrad(grad);
        if !grad.is_finite() {
            return Err(Error::Numeric("non-finite gradient".into()));
        }
        Ok((grad, Batch::new(rows, self.input_dim(), delta)?))
    }

    /// Clamps every parameter into `[-c, c]`.
    pub fn clip_params(&mut self, c: f64) -> Result<()> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("clip value must be positive, got {c}")));
        }
        self.params.iter_mut().for_each(|p| *p = p.clamp(-c, c));
        Ok(())
    }

    pub fn max_abs_param(&self) -> f64 {
        self.params.iter().fold(0.0, |m, p| m.max(p.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("learning rate must be >= 0, got {}", self.lr)));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Config(format!("{name} must lie in [0, 1), got {b}")));
            }
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("adam epsilon must be > 0, got {}", self.eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam descent step on `mlp`.
pub fn adam_step(mlp: &mut Mlp, grad: &ParamGrad, state: &mut AdamState, config: &AdamConfig) -> Result<()> {
    config.validate()?;
    if grad.len() != mlp.params.len() || state.m.len() != mlp.params.len() {
        return Err(Error::Shape("gradient, optimizer state and parameters differ in length".into()));
    }
    if !grad.is_finite() {
        return Err(Error::Numeric("non-finite gradient passed to adam".into()));
    }
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - config.beta1.powi(t);
    let bc2 = 1.0 - config.beta2.powi(t);
    for (((p, g), m), v) in mlp
        .params
        .iter_mut()
        .zip(grad.as_slice())
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = config.beta1 * *m + (1.0 - config.beta1) * g;
        *v = config.beta2 * *v + (1.0 - config.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= config.lr * m_hat / (v_hat.sqrt() + config.eps);
    }
    Ok(())
}
