//! Frame-following baseline: no reward, no learning. Each step it finds the
//! sequence frame nearest to the current observation and takes the discrete
//! action whose predicted next observation is most similar to the frame after
//! it. Prediction uses the environment's own deterministic dynamics, standing
//! in for a perfect inverse-dynamics model; the only thing that can mislead it
//! is the reference sequence.

use std::collections::VecDeque;

use crate::agent::{
    discrete_action, episode_seed, episode_sequence, CurvePoint, LearningCurve, RunSpec,
    N_ACTIONS, ROLLING_WINDOW,
};
use crate::env::{Env, EnvState};
use crate::error::{Error, Result};
use crate::latent::{multi_view_similarity, MultiViewLatent, ViewWeights};
use crate::sequence::GeneratedSequence;

/// Index of the frame most similar to `z`; ties go to the later frame.
pub fn nearest_frame(z: &MultiViewLatent, seq: &GeneratedSequence, weights: &ViewWeights) -> Result<usize> {
    let mut best = (0, f64::NEG_INFINITY);
    for (h, frame) in seq.frames().iter().enumerate() {
        let s = multi_view_similarity(z, frame, weights)?;
        if s >= best.1 {
            best = (h, s);
        }
    }
    Ok(best.0)
}

/// The follower's action index in `state`. Ties go to the lowest index.
pub fn follow_action(
    env: &Env,
    state: &EnvState,
    z: &MultiViewLatent,
    seq: &GeneratedSequence,
    weights: &ViewWeights,
) -> Result<usize> {
    let k = nearest_frame(z, seq, weights)?;
    let target = seq.frame((k + 1).min(seq.horizon() - 1));
    let mut best = (0, f64::NEG_INFINITY);
    for a in 0..N_ACTIONS {
        let out = env.step(state, &discrete_action(a))?;
        let s = multi_view_similarity(&out.observation, target, weights)?;
        if s > best.1 {
            best = (a, s);
        }
    }
    Ok(best.0)
}

/// Runs `episodes` follower episodes with the same resets and reference
/// sequences a training run with `spec` and `seed` would see.
pub fn follow_run(spec: &RunSpec, seed: u64, episodes: usize) -> Result<LearningCurve> {
    if episodes == 0 {
        return Err(Error::usage("baseline needs at least one episode"));
    }
    spec.corruption.validate()?;
    let env = Env::new(spec.task.clone());
    let weights = &spec.reward.weights;
    let mut curve = LearningCurve::default();
    let mut window: VecDeque<bool> = VecDeque::with_capacity(ROLLING_WINDOW);
    let mut steps = 0;
    for episode in 0..episodes {
        let (mut state, mut z) = env.reset(episode_seed(seed, episode));
        let seq = episode_sequence(spec, seed, episode, &state)?;
        let mut sim_sum = 0.0;
        let mut n = 0;
        let success = loop {
            let a = follow_action(&env, &state, &z, &seq, weights)?;
            let out = env.step(&state, &discrete_action(a))?;
            steps += 1;
            n += 1;
            let k = nearest_frame(&out.observation, &seq, weights)?;
            sim_sum += multi_view_similarity(&out.observation, seq.frame(k), weights)?;
            state = out.state;
            z = out.observation;
            if out.done {
                break out.sparse == 1.0;
            }
        };
        if window.len() == ROLLING_WINDOW {
            window.pop_front();
        }
        window.push_back(success);
        curve.points.push(CurvePoint {
            step: steps,
            episode,
            success,
            success_rolling20: window.iter().filter(|&&s| s).count() as f64 / window.len() as f64,
            r_dist_mean: sim_sum / n as f64,
            r_prog_mean: 0.0,
            r_expl_mean: 0.0,
            m_final: nearest_frame(&z, &seq, weights)? + 1,
        });
    }
    Ok(curve)
}
