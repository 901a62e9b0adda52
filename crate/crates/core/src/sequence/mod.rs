//! Reference key-frame sequences: the oracle provider, the TVSEQ file
//! format, and corruption protocols for robustness studies.

mod corrupt;
mod tvseq;

pub use corrupt::{corrupt, CorruptionMode, CorruptionSpec};
pub use tvseq::{decode, encode_bytes, load, save, MAGIC, VERSION};

use crate::env::{encode, expert_rollout, EnvState, TaskId, TaskSpec};
use crate::error::{Error, Result};
use crate::latent::{MultiViewLatent, ViewSet};

/// Default number of key frames.
pub const DEFAULT_HORIZON: usize = 8;

/// `H ≥ 2` multi-view frames predicted for one episode, frame 0 being the
/// conditioning observation.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSequence {
    task_id: String,
    frames: Vec<MultiViewLatent>,
}

impl GeneratedSequence {
    pub fn new(task_id: impl Into<String>, frames: Vec<MultiViewLatent>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::usage(format!(
                "a sequence needs at least 2 frames, got {}",
                frames.len()
            )));
        }
        if frames.len() > u16::MAX as usize {
            return Err(Error::usage("sequence horizon exceeds 65535"));
        }
        let first = &frames[0];
        if let Some(i) = frames.iter().position(|f| !f.same_shape(first)) {
            return Err(Error::usage(format!("frame {i} differs in views or dimensions")));
        }
        Ok(GeneratedSequence {
            task_id: task_id.into(),
            frames,
        })
    }

    pub fn task_id(&self) -> &str {
        &self.task_id
    }

    pub fn horizon(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[MultiViewLatent] {
        &self.frames
    }

    pub fn frame(&self, h: usize) -> &MultiViewLatent {
        &self.frames[h]
    }

    pub fn last(&self) -> &MultiViewLatent {
        self.frames.last().expect("H >= 2")
    }

    pub fn views(&self) -> &ViewSet {
        self.frames[0].views()
    }

    pub(crate) fn frames_mut(&mut self) -> &mut Vec<MultiViewLatent> {
        &mut self.frames
    }
}

/// Source of the reference sequence for each episode.
pub trait SequenceProvider: Send + Sync {
    fn generate(
        &self,
        task: &TaskSpec,
        initial: &EnvState,
        horizon: usize,
    ) -> Result<GeneratedSequence>;
}

/// Re-encodes the scripted expert's rollout from the episode's start state.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleProvider;

impl SequenceProvider for OracleProvider {
    fn generate(
        &self,
        task: &TaskSpec,
        initial: &EnvState,
        horizon: usize,
    ) -> Result<GeneratedSequence> {
        oracle_for_task(task, initial, horizon)
    }
}

/// Replays one fixed sequence (for example a loaded TVSEQ file) every episode.
#[derive(Clone, Debug)]
pub struct FixedProvider {
    sequence: GeneratedSequence,
}

impl FixedProvider {
    pub fn new(sequence: GeneratedSequence) -> Self {
        FixedProvider { sequence }
    }
}

impl SequenceProvider for FixedProvider {
    fn generate(&self, _: &TaskSpec, _: &EnvState, horizon: usize) -> Result<GeneratedSequence> {
        if horizon != self.sequence.horizon() {
            return Err(Error::usage(format!(
                "fixed sequence has H = {}, run asks for {horizon}",
                self.sequence.horizon()
            )));
        }
        Ok(self.sequence.clone())
    }
}

/// Oracle sequence for a registered task given by name.
pub fn oracle_sequence(task_id: &str, initial: &EnvState, horizon: usize) -> Result<GeneratedSequence> {
    let id: TaskId = task_id.parse()?;
    oracle_for_task(&TaskSpec::get(id), initial, horizon)
}

/// `H` key frames at evenly spaced progress fractions `0, 1/(H-1), …, 1` of
/// the scripted expert's trajectory from `initial`.
pub fn oracle_for_task(
    task: &TaskSpec,
    initial: &EnvState,
    horizon: usize,
) -> Result<GeneratedSequence> {
    if horizon < 2 {
        return Err(Error::usage(format!("horizon must be at least 2, got {horizon}")));
    }
    let states = expert_rollout(task, initial);
    let last = (states.len() - 1) as f64;
    let frames = (0..horizon)
        .map(|h| {
            let idx = (h as f64 * last / (horizon - 1) as f64).round() as usize;
            encode(task, &states[idx])
        })
        .collect();
    GeneratedSequence::new(task.id.as_str(), frames)
}
