//! Random network distillation on flattened multi-view latents.
//!
//! A frozen, randomly initialized target network and an online predictor
//! share the architecture `input → 64 tanh → 32 linear`. The prediction error
//! on a state is high until the predictor has been trained on similar states,
//! which makes it a novelty bonus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::MultiViewLatent;

pub const HIDDEN: usize = 64;
pub const OUTPUT: usize = 32;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-4;
const VAR_EPS: f64 = 1e-8;

/// Two-layer perceptron, row-major weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    /// `hidden × input`
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `output × hidden`
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(input: usize, hidden: usize, output: usize) -> Self {
        MlpParams {
            input,
            hidden,
            output,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; output * hidden],
            b2: vec![0.0; output],
        }
    }

    /// Uniform in `±1/√fan_in` for every weight and bias.
    pub fn init(input: usize, hidden: usize, output: usize, rng: &mut impl Rng) -> Self {
        let mut p = MlpParams::zeros(input, hidden, output);
        let b1 = 1.0 / (input as f64).sqrt();
        let b2 = 1.0 / (hidden as f64).sqrt();
        p.w1.iter_mut().for_each(|w| *w = rng.random_range(-b1..b1));
        p.b1.iter_mut().for_each(|w| *w = rng.random_range(-b1..b1));
        p.w2.iter_mut().for_each(|w| *w = rng.random_range(-b2..b2));
        p.b2.iter_mut().for_each(|w| *w = rng.random_range(-b2..b2));
        p
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// All parameters in a fixed order (w1, b1, w2, b2), mutable.
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.w1
            .iter()
            .chain(self.b1.iter())
            .chain(self.w2.iter())
            .chain(self.b2.iter())
    }

    fn is_finite(&self) -> bool {
        self.params().all(|p| p.is_finite())
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden)
            .map(|i| {
                let row = &self.w1[i * self.input..(i + 1) * self.input];
                let pre: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[i];
                pre.tanh()
            })
            .collect()
    }

    fn output_from_hidden(&self, h: &[f64]) -> Vec<f64> {
        (0..self.output)
            .map(|k| {
                let row = &self.w2[k * self.hidden..(k + 1) * self.hidden];
                row.iter().zip(h).map(|(w, v)| w * v).sum::<f64>() + self.b2[k]
            })
            .collect()
    }
}

pub fn forward(params: &MlpParams, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != params.input {
        return Err(Error::usage(format!(
            "network expects {} inputs, got {}",
            params.input,
            x.len()
        )));
    }
    Ok(params.output_from_hidden(&params.hidden_activations(x)))
}

/// Mean squared error between the predictor's and the target's outputs.
pub fn prediction_error(predictor: &MlpParams, target_out: &[f64], x: &[f64]) -> f64 {
    let p = predictor.output_from_hidden(&predictor.hidden_activations(x));
    mse(&p, target_out)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Gradient of [`prediction_error`] with respect to every predictor parameter,
/// in the same layout as the parameters. Also returns the loss.
pub fn prediction_gradient(predictor: &MlpParams, target_out: &[f64], x: &[f64]) -> (MlpParams, f64) {
    let p = predictor;
    let h = p.hidden_activations(x);
    let y = p.output_from_hidden(&h);
    let k = p.output as f64;
    let dy: Vec<f64> = y.iter().zip(target_out).map(|(a, b)| 2.0 * (a - b) / k).collect();

    let mut g = MlpParams::zeros(p.input, p.hidden, p.output);
    let mut dh = vec![0.0; p.hidden];
    for (o, &d) in dy.iter().enumerate() {
        g.b2[o] = d;
        let row = o * p.hidden;
        for j in 0..p.hidden {
            g.w2[row + j] = d * h[j];
            dh[j] += d * p.w2[row + j];
        }
    }
    for j in 0..p.hidden {
        let dpre = dh[j] * (1.0 - h[j] * h[j]);
        g.b1[j] = dpre;
        let row = j * p.input;
        for (i, &xi) in x.iter().enumerate() {
            g.w1[row + i] = dpre * xi;
        }
    }
    (g, mse(&y, target_out))
}

/// Welford accumulator over raw prediction errors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Population variance; 0 before two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / self.count as f64).max(0.0)
        }
    }
}

/// Anything that turns an observation into a nonnegative exploration bonus
/// (and may learn from it).
pub trait ExplorationBonus {
    fn bonus(&mut self, z: &MultiViewLatent) -> f64;
}

/// No exploration bonus.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoBonus;

impl ExplorationBonus for NoBonus {
    fn bonus(&mut self, _: &MultiViewLatent) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RndState {
    target: MlpParams,
    pub predictor: MlpParams,
    pub stats: RunningStats,
    pub learning_rate: f64,
}

impl RndState {
    /// Target and predictor drawn independently from one seeded stream.
    pub fn new(input: usize, seed: u64, learning_rate: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = MlpParams::init(input, HIDDEN, OUTPUT, &mut rng);
        let predictor = MlpParams::init(input, HIDDEN, OUTPUT, &mut rng);
        RndState::with_networks(target, predictor, learning_rate)
    }

    pub fn with_networks(target: MlpParams, predictor: MlpParams, learning_rate: f64) -> Self {
        assert_eq!(
            (target.input, target.hidden, target.output),
            (predictor.input, predictor.hidden, predictor.output),
            "target and predictor shapes differ"
        );
        RndState {
            target,
            predictor,
            stats: RunningStats::default(),
            learning_rate,
        }
    }

    pub fn target(&self) -> &MlpParams {
        &self.target
    }

    pub fn input_dim(&self) -> usize {
        self.target.input
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.target.input {
            return Err(Error::usage(format!(
                "RND configured for {} inputs, latent has {}",
                self.target.input,
                x.len()
            )));
        }
        Ok(())
    }

    /// Prediction MSE on `z`; no side effects.
    pub fn raw_error(&self, z: &MultiViewLatent) -> Result<f64> {
        let x = z.flatten();
        self.check(&x)?;
        let t = forward(&self.target, &x)?;
        Ok(prediction_error(&self.predictor, &t, &x))
    }

    /// Raw error divided by the running standard deviation of raw errors.
    /// The statistics include this query.
    pub fn intrinsic_reward(&mut self, z: &MultiViewLatent) -> Result<f64> {
        let raw = self.raw_error(z)?;
        self.stats.push(raw);
        let r = raw / (self.stats.variance() + VAR_EPS).sqrt();
        Ok(if r.is_finite() { r.max(0.0) } else { 0.0 })
    }

    /// One plain gradient step on the predictor toward the target's output.
    pub fn train(&mut self, z: &MultiViewLatent) -> Result<()> {
        let x = z.flatten();
        self.check(&x)?;
        if self.learning_rate == 0.0 {
            return Ok(());
        }
        let t = forward(&self.target, &x)?;
        let (grad, _) = prediction_gradient(&self.predictor, &t, &x);
        let lr = self.learning_rate;
        for (p, g) in self.predictor.params_mut().zip(grad.params()) {
            *p -= lr * g;
        }
        debug_assert!(self.predictor.is_finite());
        Ok(())
    }
}

impl ExplorationBonus for RndState {
    /// Novelty of `z` before learning from it, then one training step.
    fn bonus(&mut self, z: &MultiViewLatent) -> f64 {
        let r = self.intrinsic_reward(z).expect("latent matches RND input size");
        self.train(z).expect("latent matches RND input size");
        r
    }
}
