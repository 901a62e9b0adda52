//! Per-step rewards against a reference sequence.
//!
//! ```text
//! h*      = argmax_{h ∈ {0, …, max(M-1, 0)}} σ(z, ẑ_h)      (ties → larger h)
//! r_dist  = σ(z, ẑ_{h*})
//! r_prog  = α·h* + 𝟙[σ(z, ẑ_{H-1}) > θ]      or  α·h* + r_spar
//! r_expl  = clip(scale · bonus(z), 0, clip)
//! r_total = r_dist + r_prog + r_expl
//! ```
//!
//! `M` counts reached frames. After the rewards for a step are computed, `M`
//! advances by one if the observation matches the next unreached frame:
//! `σ(z, ẑ_M) ≥ θ`. It never exceeds `H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::{multi_view_similarity, MultiViewLatent, ViewWeights};
use crate::rnd::ExplorationBonus;
use crate::sequence::GeneratedSequence;

pub const DEFAULT_THETA: f64 = 0.8;
pub const DEFAULT_ALPHA: f64 = 0.125;
pub const DEFAULT_EXPLORE_SCALE: f64 = 1.0;
pub const DEFAULT_EXPLORE_CLIP: f64 = 5.0;

/// Which terms of the total reward are active. Disabled terms are reported
/// as exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub dist: bool,
    pub prog: bool,
    pub expl: bool,
}

impl Default for Components {
    fn default() -> Self {
        Components {
            dist: true,
            prog: true,
            expl: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardConfig {
    pub theta: f64,
    pub alpha: f64,
    pub weights: ViewWeights,
    pub explore_scale: f64,
    pub explore_clip: f64,
    pub components: Components,
}

impl RewardConfig {
    pub fn new(weights: ViewWeights) -> Self {
        RewardConfig {
            theta: DEFAULT_THETA,
            alpha: DEFAULT_ALPHA,
            weights,
            explore_scale: DEFAULT_EXPLORE_SCALE,
            explore_clip: DEFAULT_EXPLORE_CLIP,
            components: Components::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::usage(format!("theta {} outside (0, 1]", self.theta)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::usage(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.explore_scale >= 0.0 && self.explore_scale.is_finite()) {
            return Err(Error::usage("explore_scale must be finite and nonnegative"));
        }
        if !(self.explore_clip > 0.0 && self.explore_clip.is_finite()) {
            return Err(Error::usage("explore_clip must be positive"));
        }
        Ok(())
    }
}

/// Reached-frame tracker for one episode against one sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressState {
    reached: usize,
    last_h_star: usize,
    horizon: usize,
}

impl ProgressState {
    pub fn new(horizon: usize) -> Self {
        ProgressState {
            reached: 0,
            last_h_star: 0,
            horizon,
        }
    }

    pub fn for_sequence(seq: &GeneratedSequence) -> Self {
        ProgressState::new(seq.horizon())
    }

    /// Builds an arbitrary valid state, e.g. for tests.
    pub fn with_reached(horizon: usize, reached: usize) -> Result<Self> {
        if reached > horizon {
            return Err(Error::usage(format!("reached {reached} exceeds H = {horizon}")));
        }
        Ok(ProgressState {
            reached,
            last_h_star: 0,
            horizon,
        })
    }

    pub fn reached(&self) -> usize {
        self.reached
    }

    pub fn last_h_star(&self) -> usize {
        self.last_h_star
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn check(&self, seq: &GeneratedSequence) -> Result<()> {
        if self.horizon != seq.horizon() {
            return Err(Error::usage(format!(
                "progress state tracks H = {}, sequence has H = {}",
                self.horizon,
                seq.horizon()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_dist: f64,
    pub r_prog: f64,
    pub r_expl: f64,
    pub r_total: f64,
    pub h_star: usize,
    pub reached_after: usize,
}

/// Best-matching frame among the reached prefix. With nothing reached yet the
/// prefix is `{0}`: frame 0 is the episode's own first observation.
pub fn best_prefix_match(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    state: &ProgressState,
    weights: &ViewWeights,
) -> Result<(usize, f64)> {
    state.check(seq)?;
    let last = state.reached.saturating_sub(1);
    let mut best = (0, f64::NEG_INFINITY);
    for (h, frame) in seq.frames()[..=last].iter().enumerate() {
        let sim = multi_view_similarity(z, frame, weights)?;
        if sim >= best.1 {
            best = (h, sim);
        }
    }
    Ok(best)
}

pub fn distance_reward(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    state: &ProgressState,
    config: &RewardConfig,
) -> Result<f64> {
    Ok(best_prefix_match(z, seq, state, &config.weights)?.1)
}

/// `α·h*` plus the terminal bonus: the environment's sparse signal when given,
/// otherwise whether `z` is more than `θ`-similar to the last frame.
pub fn progress_reward(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    state: &ProgressState,
    config: &RewardConfig,
    sparse: Option<f64>,
) -> Result<f64> {
    let (h_star, _) = best_prefix_match(z, seq, state, &config.weights)?;
    let terminal = terminal_bonus(z, seq, config, sparse)?;
    Ok(config.alpha * h_star as f64 + terminal)
}

fn terminal_bonus(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    config: &RewardConfig,
    sparse: Option<f64>,
) -> Result<f64> {
    match sparse {
        Some(s) if s == 0.0 || s == 1.0 => Ok(s),
        Some(s) => Err(Error::usage(format!("sparse reward must be 0 or 1, got {s}"))),
        None => {
            let sim = multi_view_similarity(z, seq.last(), &config.weights)?;
            Ok(if sim > config.theta { 1.0 } else { 0.0 })
        }
    }
}

/// Advances `M` when `z` matches the next unreached frame (`σ ≥ θ`).
pub fn update_reached(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    state: &ProgressState,
    config: &RewardConfig,
) -> Result<ProgressState> {
    state.check(seq)?;
    let mut next = *state;
    if state.reached < state.horizon {
        let sim = multi_view_similarity(z, seq.frame(state.reached), &config.weights)?;
        if sim >= config.theta {
            next.reached += 1;
        }
    }
    Ok(next)
}

/// One environment step: rewards against the pre-update state, then the
/// reached-frame update. `sparse = Some(_)` selects the variant that uses the
/// environment's success signal as the terminal bonus.
pub fn step_reward(
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    state: &ProgressState,
    config: &RewardConfig,
    bonus: &mut dyn ExplorationBonus,
    sparse: Option<f64>,
) -> Result<(RewardBreakdown, ProgressState)> {
    state.check(seq)?;
    let (h_star, sim) = best_prefix_match(z, seq, state, &config.weights)?;
    let terminal = terminal_bonus(z, seq, config, sparse)?;
    let c = config.components;

    let r_dist = if c.dist { sim } else { 0.0 };
    let r_prog = if c.prog {
        config.alpha * h_star as f64 + terminal
    } else {
        0.0
    };
    let r_expl = if c.expl && config.explore_scale > 0.0 {
        (config.explore_scale * bonus.bonus(z)).clamp(0.0, config.explore_clip)
    } else {
        0.0
    };

    let mut next = update_reached(z, seq, state, config)?;
    next.last_h_star = h_star;
    let breakdown = RewardBreakdown {
        r_dist,
        r_prog,
        r_expl,
        r_total: r_dist + r_prog + r_expl,
        h_star,
        reached_after: next.reached,
    };
    Ok((breakdown, next))
}
