//! Tabular Q-learning over hashed multi-view latents, and the training loop
//! that wires environment, sequence provider, reward engine and learner.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::env::{encode, expert_rollout, Env, EnvAction, TaskId, TaskSpec, MAX_SPEED};
use crate::error::{Error, Result};
use crate::latent::MultiViewLatent;
use crate::reward::{step_reward, ProgressState, RewardBreakdown, RewardConfig};
use crate::rnd::{NoBonus, RndState};
use crate::sequence::{corrupt, CorruptionMode, CorruptionSpec, SequenceProvider};

pub const N_DIRECTIONS: usize = 9;
pub const N_ACTIONS: usize = 2 * N_DIRECTIONS;
pub const DEFAULT_HASH_BITS: usize = 12;
/// Bits available to the latent hash; the rest of the key holds `M`.
pub const CODE_BITS: usize = 56;
pub const DEFAULT_HASH_WIDTH: f64 = 0.05;
/// Episodes in the rolling success window.
pub const ROLLING_WINDOW: usize = 20;

const DIRECTIONS: [[f64; 2]; N_DIRECTIONS] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [-1.0, 0.0],
    [0.0, 1.0],
    [0.0, -1.0],
    [1.0, 1.0],
    [1.0, -1.0],
    [-1.0, 1.0],
    [-1.0, -1.0],
];

/// Discrete action `i`: direction `i / 2` at full speed, gripper open when
/// `i` is even and closed when odd.
pub fn discrete_action(index: usize) -> EnvAction {
    let [dx, dy] = DIRECTIONS[index / 2];
    let aperture = if index % 2 == 0 { 1.0 } else { 0.0 };
    EnvAction::new(dx * MAX_SPEED, dy * MAX_SPEED, aperture)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Environment success signal only; the reward engine is bypassed.
    SparseOnly,
    /// Distance + progress (similarity-based terminal bonus) + exploration.
    Tevir,
    /// As `Tevir`, with the environment's sparse signal as the terminal bonus.
    TevirPlus,
}

impl RewardMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RewardMode::SparseOnly => "sparse_only",
            RewardMode::Tevir => "tevir",
            RewardMode::TevirPlus => "tevir_plus",
        }
    }

    pub fn uses_engine(self) -> bool {
        !matches!(self, RewardMode::SparseOnly)
    }
}

impl fmt::Display for RewardMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse_only" => Ok(RewardMode::SparseOnly),
            "tevir" => Ok(RewardMode::Tevir),
            "tevir_plus" => Ok(RewardMode::TevirPlus),
            _ => Err(Error::usage(format!("unknown reward mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the step budget over which epsilon decays linearly.
    pub epsilon_decay_fraction: f64,
    /// Hash bits per view.
    pub hash_bits: usize,
    /// Bucket width of the projection hash.
    pub hash_width: f64,
    /// Every training reward is lowered by `optimism × r_max`, where `r_max`
    /// is the largest non-exploration reward the mode can pay in one step.
    /// Visited state-actions drift below the unseen default of 0, which
    /// drives exploration, and each step spent short of success costs.
    pub optimism: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.99,
            learning_rate: 0.3,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.4,
            hash_bits: DEFAULT_HASH_BITS,
            hash_width: DEFAULT_HASH_WIDTH,
            optimism: 0.6,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config(format!("gamma {} outside (0, 1)", self.gamma)));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::config("agent learning_rate outside [0, 1]"));
        }
        let eps_ok = |e: f64| (0.05..=1.0).contains(&e);
        if !eps_ok(self.epsilon_start) || !eps_ok(self.epsilon_end) {
            return Err(Error::config("epsilon values must lie in [0.05, 1]"));
        }
        if !(self.epsilon_decay_fraction > 0.0 && self.epsilon_decay_fraction <= 1.0) {
            return Err(Error::config("epsilon_decay_fraction outside (0, 1]"));
        }
        if !(0.0..1.0).contains(&self.optimism) {
            return Err(Error::config("optimism outside [0, 1)"));
        }
        if !(self.hash_width > 0.0 && self.hash_width.is_finite()) {
            return Err(Error::config("hash_width must be positive"));
        }
        if self.hash_bits == 0 {
            return Err(Error::config("hash_bits must be positive"));
        }
        Ok(())
    }

    pub fn epsilon(&self, step: usize, budget: usize) -> f64 {
        let horizon = self.epsilon_decay_fraction * budget as f64;
        let frac = (step as f64 / horizon).min(1.0);
        self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)
    }
}

/// Random-projection hash of each view: bit `i` is the parity of the bucket
/// `floor((w_i·z + b_i) / width)`, with Gaussian `w_i` and uniform offsets
/// `b_i`. Bits of all views are concatenated into one code.
#[derive(Clone, Debug)]
pub struct StateHasher {
    width: f64,
    /// Per view, `bits × dim` row-major.
    projections: Vec<Vec<f64>>,
    offsets: Vec<Vec<f64>>,
}

impl StateHasher {
    pub fn new(dims: &[usize], bits: usize, width: f64, seed: u64) -> Result<Self> {
        if bits * dims.len() > CODE_BITS {
            return Err(Error::config(format!(
                "{} views × {bits} bits do not fit a {CODE_BITS}-bit code",
                dims.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let projections = dims
            .iter()
            .map(|&d| (0..bits * d).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let offsets = dims
            .iter()
            .map(|_| (0..bits).map(|_| rng.random::<f64>() * width).collect())
            .collect();
        Ok(StateHasher {
            width,
            projections,
            offsets,
        })
    }

    pub fn code(&self, z: &MultiViewLatent) -> u64 {
        let mut code = 0u64;
        for ((v, proj), offs) in z.vectors().iter().zip(&self.projections).zip(&self.offsets) {
            let x = v.as_slice();
            for (row, b) in proj.chunks_exact(x.len()).zip(offs) {
                let dot: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                let bucket = ((dot + b) / self.width).floor() as i64;
                code = (code << 1) | (bucket & 1) as u64;
            }
        }
        code
    }
}

pub type QTable = HashMap<u64, [f64; N_ACTIONS]>;

const UNSEEN: [f64; N_ACTIONS] = [0.0; N_ACTIONS];

fn greedy(values: &[f64; N_ACTIONS]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy over the discrete actions; greedy ties go to the lowest
/// index and unseen states read as all zeros.
pub fn select_action(q: &QTable, state: u64, epsilon: f64, rng: &mut impl Rng) -> usize {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return rng.random_range(0..N_ACTIONS);
    }
    greedy(q.get(&state).unwrap_or(&UNSEEN))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub state: u64,
    pub action: usize,
    pub reward: f64,
    pub next_state: u64,
    pub done: bool,
}

/// `Q(s,a) += lr · (r + γ·(1-done)·max Q(s',·) − Q(s,a))`
pub fn update(q: &mut QTable, t: &Transition, gamma: f64, lr: f64) -> Result<()> {
    if !t.reward.is_finite() {
        return Err(Error::usage(format!("non-finite reward {}", t.reward)));
    }
    let bootstrap = if t.done {
        0.0
    } else {
        let next = q.get(&t.next_state).unwrap_or(&UNSEEN);
        next.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    };
    let row = q.entry(t.state).or_insert(UNSEEN);
    let target = t.reward + gamma * bootstrap;
    row[t.action] += lr * (target - row[t.action]);
    Ok(())
}

/// Environment of exploration-bonus settings for a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RndConfig {
    pub learning_rate: f64,
}

impl Default for RndConfig {
    fn default() -> Self {
        RndConfig {
            learning_rate: crate::rnd::DEFAULT_LEARNING_RATE,
        }
    }
}

/// Everything one training run needs.
#[derive(Clone)]
pub struct RunSpec {
    pub task: TaskSpec,
    pub mode: RewardMode,
    pub reward: RewardConfig,
    pub agent: AgentConfig,
    pub rnd: RndConfig,
    pub steps: usize,
    pub horizon: usize,
    pub corruption: CorruptionSpec,
    pub provider: Arc<dyn SequenceProvider>,
    /// Episodes whose full trace is kept (by index).
    pub trace_episodes: Vec<usize>,
}

impl fmt::Debug for RunSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunSpec")
            .field("task", &self.task.id)
            .field("mode", &self.mode)
            .field("steps", &self.steps)
            .field("horizon", &self.horizon)
            .field("corruption", &self.corruption)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Environment steps taken when the episode ended.
    pub step: usize,
    pub episode: usize,
    pub success: bool,
    pub success_rolling20: f64,
    pub r_dist_mean: f64,
    pub r_prog_mean: f64,
    pub r_expl_mean: f64,
    pub m_final: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn final_success(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.success_rolling20)
    }

    /// First step at which a full rolling window reaches `threshold`.
    pub fn steps_to(&self, threshold: f64) -> Option<usize> {
        self.points
            .iter()
            .filter(|p| p.episode + 1 >= ROLLING_WINDOW)
            .find(|p| p.success_rolling20 >= threshold)
            .map(|p| p.step)
    }
}

/// One episode, step by step. Index 0 is the reset observation (whose
/// breakdown primes the progress tracker but is not a learning reward).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RolloutTrace {
    pub task: String,
    pub mode: String,
    pub seed: u64,
    pub episode: usize,
    pub views: Vec<String>,
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<EnvAction>,
    pub sparse: Vec<f64>,
    pub breakdowns: Vec<RewardBreakdown>,
    pub reached: Vec<usize>,
    pub success: bool,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub curve: LearningCurve,
    pub traces: Vec<RolloutTrace>,
    /// Distinct hashed states seen during training.
    pub distinct_states: usize,
}

/// Largest per-step training reward of the run's mode, exploration aside.
pub fn max_step_reward(spec: &RunSpec) -> f64 {
    if !spec.mode.uses_engine() {
        return 1.0;
    }
    let c = &spec.reward.components;
    let dist = if c.dist { 1.0 } else { 0.0 };
    let prog = if c.prog {
        spec.reward.alpha * (spec.horizon - 1) as f64 + 1.0
    } else {
        0.0
    };
    dist + prog
}

/// Deterministic sub-seed for stream `stream` and index `index`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(index.wrapping_mul(0x94D0_49BB_1331_11EB))
        .wrapping_add(0x2545_F491_4F6C_DD1D);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_EPISODE: u64 = 1;
const STREAM_CORRUPT: u64 = 2;
const STREAM_POLICY: u64 = 3;
const STREAM_HASH: u64 = 4;
const STREAM_RND: u64 = 5;

/// Reset seed of episode `episode` in a run with `seed`.
pub fn episode_seed(seed: u64, episode: usize) -> u64 {
    derive_seed(seed, STREAM_EPISODE, episode as u64)
}

/// Task whose sequences serve as task-irrelevant donor frames.
pub fn donor_task(id: TaskId) -> TaskId {
    let i = TaskId::ALL.iter().position(|&t| t == id).unwrap();
    TaskId::ALL[(i + 1) % TaskId::ALL.len()]
}

/// The reference sequence used for episode `episode` of a run.
pub fn episode_sequence(
    spec: &RunSpec,
    seed: u64,
    episode: usize,
    initial: &crate::env::EnvState,
) -> Result<crate::sequence::GeneratedSequence> {
    let seq = spec.provider.generate(&spec.task, initial, spec.horizon)?;
    let cspec = spec
        .corruption
        .with_seed(derive_seed(seed, STREAM_CORRUPT, episode as u64));
    if cspec.mode == CorruptionMode::IrrelevantFrames {
        let donor_spec = TaskSpec::get(donor_task(spec.task.id));
        let ep_seed = episode_seed(seed, episode);
        let (donor_start, _) = Env::new(donor_spec.clone()).reset(ep_seed);
        let donor = crate::sequence::oracle_for_task(&donor_spec, &donor_start, spec.horizon)?;
        corrupt(&seq, &cspec, Some(&donor))
    } else {
        corrupt(&seq, &cspec, None)
    }
}

/// Aborts with a configuration error unless the hashed scripted-expert
/// trajectory visits at least `H` distinct codes.
pub fn check_expert_distinguishable(spec: &RunSpec, hasher: &StateHasher, seed: u64) -> Result<()> {
    let env = Env::new(spec.task.clone());
    let (start, _) = env.reset(episode_seed(seed, 0));
    let codes: HashSet<u64> = expert_rollout(&spec.task, &start)
        .iter()
        .map(|s| hasher.code(&encode(&spec.task, s)))
        .collect();
    if codes.len() < spec.horizon {
        return Err(Error::config(format!(
            "hashed expert trajectory on {} visits {} distinct states, need at least H = {}",
            spec.task.id,
            codes.len(),
            spec.horizon
        )));
    }
    Ok(())
}

/// Validates `spec` and builds the run's state hasher, failing with a
/// configuration error where [`train_run`] would before its first step.
pub fn preflight(spec: &RunSpec, seed: u64) -> Result<StateHasher> {
    if spec.steps == 0 {
        return Err(Error::usage("step budget must be positive"));
    }
    spec.agent.validate()?;
    spec.reward.validate().map_err(|e| Error::config(e.to_string()))?;
    spec.corruption.validate().map_err(|e| Error::config(e.to_string()))?;
    let (_, probe) = Env::new(spec.task.clone()).reset(0);
    let hasher = StateHasher::new(
        &probe.dims(),
        spec.agent.hash_bits,
        spec.agent.hash_width,
        derive_seed(seed, STREAM_HASH, 0),
    )?;
    check_expert_distinguishable(spec, &hasher, seed)?;
    Ok(hasher)
}

/// Table key: the latent hash with the progress counter `M` in the top
/// byte. The shaped reward depends on `M`, so it has to be part of the state.
fn state_key(code: u64, reached: usize) -> u64 {
    code | ((reached as u64) << CODE_BITS)
}

/// Trains a fresh Q-table for `spec.steps` environment steps. Success is
/// always read from the environment's predicate, whatever the training reward.
///
/// Reaching success ends the episode; the terminal transition is valued as an
/// absorbing state that keeps paying its reward, `r − offset + γ·r / (1 − γ)`.
/// The optimism offset is charged for the step taken, not for the absorbing
/// state, so finishing never looks worse than stalling. A time-limit ending is
/// terminal with no bootstrap.
pub fn train_run(spec: &RunSpec, seed: u64) -> Result<TrainOutcome> {
    let hasher = preflight(spec, seed)?;
    let env = Env::new(spec.task.clone());
    let (_, probe) = env.reset(0);

    let mut rnd = RndState::new(
        probe.total_dim(),
        derive_seed(seed, STREAM_RND, 0),
        spec.rnd.learning_rate,
    );
    let mut policy_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_POLICY, 0));
    let mut q = QTable::new();
    let gamma = spec.agent.gamma;
    let lr = spec.agent.learning_rate;
    let offset = spec.agent.optimism * max_step_reward(spec);

    let mut curve = LearningCurve::default();
    let mut traces = Vec::new();
    let mut window: VecDeque<bool> = VecDeque::with_capacity(ROLLING_WINDOW);
    let mut steps = 0usize;
    let mut episode = 0usize;

    'episodes: while steps < spec.steps {
        let (mut state, z0) = env.reset(episode_seed(seed, episode));
        let keep_trace = spec.trace_episodes.contains(&episode);
        let mut trace = keep_trace.then(|| RolloutTrace {
            task: spec.task.id.to_string(),
            mode: spec.mode.to_string(),
            seed,
            episode,
            views: z0.views().iter().map(|v| v.to_string()).collect(),
            ..Default::default()
        });

        let mut engine = if spec.mode.uses_engine() {
            let seq = episode_sequence(spec, seed, episode, &state)?;
            let progress = ProgressState::for_sequence(&seq);
            Some((seq, progress))
        } else {
            None
        };
        let sparse_arg = |s: f64| (spec.mode == RewardMode::TevirPlus).then_some(s);

        let mut reward_of = |z: &MultiViewLatent, sparse: f64| -> Result<Option<RewardBreakdown>> {
            match engine.as_mut() {
                Some((seq, progress)) => {
                    let bonus: &mut dyn crate::rnd::ExplorationBonus = if spec.reward.components.expl
                        && spec.reward.explore_scale > 0.0
                    {
                        &mut rnd
                    } else {
                        &mut NoBonus
                    };
                    let (b, next) =
                        step_reward(z, seq, progress, &spec.reward, bonus, sparse_arg(sparse))?;
                    *progress = next;
                    Ok(Some(b))
                }
                None => Ok(None),
            }
        };

        let b0 = reward_of(&z0, 0.0)?;
        if let Some(t) = trace.as_mut() {
            t.observations.push(z0.flatten());
            t.sparse.push(0.0);
            if let Some(b) = b0 {
                t.breakdowns.push(b);
                t.reached.push(b.reached_after);
            }
        }

        let mut m_final = b0.map_or(0, |b| b.reached_after);
        let mut code = state_key(hasher.code(&z0), m_final);
        let mut sums = [0.0; 3];
        let mut n = 0usize;
        let success;
        loop {
            let eps = spec.agent.epsilon(steps, spec.steps);
            let a = select_action(&q, code, eps, &mut policy_rng);
            let action = discrete_action(a);
            let out = env.step(&state, &action)?;
            steps += 1;

            let breakdown = reward_of(&out.observation, out.sparse)?;
            let reward = match breakdown {
                Some(b) => {
                    sums[0] += b.r_dist;
                    sums[1] += b.r_prog;
                    sums[2] += b.r_expl;
                    m_final = b.reached_after;
                    b.r_total
                }
                None => out.sparse,
            };
            n += 1;

            let next_code = state_key(hasher.code(&out.observation), m_final);
            let succeeded = out.sparse == 1.0;
            let transition = Transition {
                state: code,
                action: a,
                reward: if succeeded {
                    reward - offset + gamma * reward / (1.0 - gamma)
                } else {
                    reward - offset
                },
                next_state: next_code,
                done: out.done,
            };
            update(&mut q, &transition, gamma, lr)?;

            if let Some(t) = trace.as_mut() {
                t.observations.push(out.observation.flatten());
                t.actions.push(action);
                t.sparse.push(out.sparse);
                if let Some(b) = breakdown {
                    t.breakdowns.push(b);
                    t.reached.push(b.reached_after);
                }
            }

            state = out.state;
            code = next_code;
            if out.done {
                success = succeeded;
                break;
            }
            if steps >= spec.steps {
                break 'episodes;
            }
        }

        if window.len() == ROLLING_WINDOW {
            window.pop_front();
        }
        window.push_back(success);
        let rolling = window.iter().filter(|&&s| s).count() as f64 / window.len() as f64;
        let mean = |s: f64| if n > 0 { s / n as f64 } else { 0.0 };
        curve.points.push(CurvePoint {
            step: steps,
            episode,
            success,
            success_rolling20: rolling,
            r_dist_mean: mean(sums[0]),
            r_prog_mean: mean(sums[1]),
            r_expl_mean: mean(sums[2]),
            m_final,
        });
        if let Some(mut t) = trace {
            t.success = success;
            traces.push(t);
        }
        episode += 1;
    }

    Ok(TrainOutcome {
        curve,
        traces,
        distinct_states: q.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighteen_distinct_actions() {
        let actions: Vec<_> = (0..N_ACTIONS).map(discrete_action).collect();
        for (i, a) in actions.iter().enumerate() {
            for b in &actions[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(actions[0].is_zero_velocity());
    }

    #[test]
    fn greedy_with_unique_max_and_ties() {
        let mut q = QTable::new();
        let mut row = [0.0; N_ACTIONS];
        row[7] = 2.0;
        q.insert(5, row);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&q, 5, 0.0, &mut rng), 7);
        assert_eq!(select_action(&q, 99, 0.0, &mut rng), 0);
        row[3] = 2.0;
        q.insert(5, row);
        assert_eq!(select_action(&q, 5, 0.0, &mut rng), 3);
    }

    #[test]
    fn zero_learning_rate_leaves_table_unchanged() {
        let mut q = QTable::new();
        q.insert(1, [0.5; N_ACTIONS]);
        let before = q.clone();
        let t = Transition {
            state: 1,
            action: 2,
            reward: 3.0,
            next_state: 1,
            done: false,
        };
        update(&mut q, &t, 0.99, 0.0).unwrap();
        assert_eq!(q, before);
    }

    #[test]
    fn single_terminal_transition() {
        let mut q = QTable::new();
        let t = Transition {
            state: 4,
            action: 1,
            reward: 1.0,
            next_state: 8,
            done: true,
        };
        update(&mut q, &t, 0.99, 0.25).unwrap();
        assert_eq!(q[&4][1], 0.25);
        assert!(update(&mut q, &Transition { reward: f64::NAN, ..t }, 0.99, 0.25).is_err());
    }

    #[test]
    fn epsilon_schedule() {
        let cfg = AgentConfig::default();
        assert_eq!(cfg.epsilon(0, 1000), 1.0);
        assert!((cfg.epsilon(200, 1000) - 0.525).abs() < 1e-12);
        assert!((cfg.epsilon(400, 1000) - 0.05).abs() < 1e-12);
        assert!((cfg.epsilon(999, 1000) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn agent_config_validation() {
        let mut cfg = AgentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.gamma = 1.0;
        assert!(cfg.validate().is_err());
        cfg.gamma = 0.9;
        cfg.epsilon_end = 0.01;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hasher_is_deterministic_and_fills_bits() {
        let task = TaskSpec::get(TaskId::Reach);
        let (_, z) = Env::new(task).reset(0);
        let h = StateHasher::new(&z.dims(), 12, 0.05, 3).unwrap();
        assert_eq!(h.code(&z), StateHasher::new(&z.dims(), 12, 0.05, 3).unwrap().code(&z));
        assert!(h.code(&z) < 1 << 36);
        assert!(StateHasher::new(&[16; 6], 12, 0.05, 0).is_err());
    }

    #[test]
    fn derived_seeds_differ_by_stream_and_index() {
        let a = derive_seed(1, 1, 0);
        assert_ne!(a, derive_seed(1, 1, 1));
        assert_ne!(a, derive_seed(1, 2, 0));
        assert_ne!(a, derive_seed(2, 1, 0));
        assert_eq!(a, derive_seed(1, 1, 0));
    }
}
