//! Degrading a reference sequence: additive Gaussian noise at a target SNR,
//! task-irrelevant replacement frames, and temporally disordered frames.
//!
//! Frame 0 is the conditioning observation and is never touched.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::GeneratedSequence;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionMode {
    #[default]
    None,
    GaussianSnr,
    IrrelevantFrames,
    DisorderedFrames,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub mode: CorruptionMode,
    /// Target signal-to-noise ratio in dB (`gaussian_snr` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Fraction of the `H` frames to corrupt (frame-error modes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_fraction: Option<f64>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl CorruptionSpec {
    pub fn none() -> Self {
        CorruptionSpec::default()
    }

    pub fn gaussian(snr_db: f64, rng_seed: u64) -> Self {
        CorruptionSpec {
            mode: CorruptionMode::GaussianSnr,
            snr_db: Some(snr_db),
            error_fraction: None,
            rng_seed,
        }
    }

    pub fn irrelevant(error_fraction: f64, rng_seed: u64) -> Self {
        CorruptionSpec {
            mode: CorruptionMode::IrrelevantFrames,
            snr_db: None,
            error_fraction: Some(error_fraction),
            rng_seed,
        }
    }

    pub fn disordered(error_fraction: f64, rng_seed: u64) -> Self {
        CorruptionSpec {
            mode: CorruptionMode::DisorderedFrames,
            snr_db: None,
            error_fraction: Some(error_fraction),
            rng_seed,
        }
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        CorruptionSpec {
            rng_seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            CorruptionMode::None => Ok(()),
            CorruptionMode::GaussianSnr => match self.snr_db {
                Some(db) if db.is_finite() => Ok(()),
                Some(db) => Err(Error::usage(format!("snr_db must be finite, got {db}"))),
                None => Err(Error::usage("gaussian_snr needs snr_db")),
            },
            CorruptionMode::IrrelevantFrames | CorruptionMode::DisorderedFrames => {
                match self.error_fraction {
                    Some(f) if (0.0..=1.0).contains(&f) => Ok(()),
                    Some(f) => Err(Error::usage(format!("error_fraction {f} outside [0, 1]"))),
                    None => Err(Error::usage("frame-error modes need error_fraction")),
                }
            }
        }
    }

    /// Number of frames a frame-error mode corrupts for horizon `h`.
    pub fn corrupted_count(&self, h: usize) -> usize {
        let f = self.error_fraction.unwrap_or(0.0);
        ((f * h as f64).round() as usize).min(h - 1)
    }
}

/// Applies `spec` to `seq`. `donor` must be a sequence from a different task
/// when the mode is `irrelevant_frames`. Deterministic in `spec.rng_seed`.
pub fn corrupt(
    seq: &GeneratedSequence,
    spec: &CorruptionSpec,
    donor: Option<&GeneratedSequence>,
) -> Result<GeneratedSequence> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut out = seq.clone();
    let h = seq.horizon();
    match spec.mode {
        CorruptionMode::None => {}
        CorruptionMode::GaussianSnr => {
            let snr_db = spec.snr_db.expect("validated");
            add_noise(&mut out, snr_db, &mut rng);
        }
        CorruptionMode::IrrelevantFrames => {
            let donor = donor.ok_or_else(|| Error::usage("irrelevant_frames needs a donor sequence"))?;
            if donor.task_id() == seq.task_id() {
                return Err(Error::usage("donor sequence must come from a different task"));
            }
            if !donor.frame(0).same_shape(seq.frame(0)) {
                return Err(Error::usage("donor frames differ in views or dimensions"));
            }
            let n = spec.corrupted_count(h);
            for i in sample(&mut rng, h - 1, n).into_iter() {
                let j = rng.random_range(0..donor.horizon());
                out.frames_mut()[i + 1] = donor.frame(j).clone();
            }
        }
        CorruptionMode::DisorderedFrames => {
            let n = spec.corrupted_count(h);
            if h > 2 {
                for i in sample(&mut rng, h - 1, n).into_iter() {
                    // Transpose frame i+1 with a different non-initial position.
                    let mut j = rng.random_range(0..h - 2);
                    if j >= i {
                        j += 1;
                    }
                    out.frames_mut().swap(i + 1, j + 1);
                }
            }
        }
    }
    Ok(out)
}

/// Adds zero-mean Gaussian noise to frames `1..H` so that the sequence-wide
/// mean squared entry over the noise power on those frames is exactly
/// `10^(snr_db/10)`.
fn add_noise(seq: &mut GeneratedSequence, snr_db: f64, rng: &mut ChaCha8Rng) {
    let frames = seq.frames_mut();
    let (sum_sq, count) = frames
        .iter()
        .flat_map(|f| f.vectors().iter().flat_map(|v| v.as_slice()))
        .fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    let signal_power = sum_sq / count as f64;
    let noise_power = signal_power / 10f64.powf(snr_db / 10.0);

    let noisy = &mut frames[1..];
    let len: usize = noisy.iter().map(|f| f.total_dim()).sum();
    let mut noise: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let mean = noise.iter().sum::<f64>() / len as f64;
    noise.iter_mut().for_each(|x| *x -= mean);
    let drawn = noise.iter().map(|x| x * x).sum::<f64>() / len as f64;
    let gain = if drawn > 0.0 {
        (noise_power / drawn).sqrt()
    } else {
        0.0
    };

    let mut k = 0;
    for f in noisy.iter_mut() {
        for v in f.vectors_mut() {
            for x in v.values_mut() {
                *x += gain * noise[k];
                k += 1;
            }
        }
    }
}
