//! Planar manipulation tasks with multi-view feature observations.
//!
//! The workspace is the unit square. A gripper moves with a per-axis velocity
//! clipped to [`MAX_SPEED`] and carries a scalar aperture. Each task has a
//! single object: a reach target, a pushable block, a button or a drawer.
//! Buttons and drawers carry an articulation scalar that only changes while
//! the gripper is engaged with the object's key point (within
//! [`GRASP_RADIUS`] and aperture below [`GRASP_APERTURE`]).
//!
//! Observations are three feature views built from fixed Fourier feature maps
//! (see [`encode`]). The reward side of the crate only ever sees those views.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent::{LatentVector, MultiViewLatent, ViewSet, DEFAULT_DIM};

/// Default episode horizon.
pub const HORIZON: usize = 100;
/// Per-axis speed limit, workspace units per step.
pub const MAX_SPEED: f64 = 0.05;
/// Distance within which the gripper engages an articulated object.
pub const GRASP_RADIUS: f64 = 0.03;
/// Apertures strictly below this count as closed.
pub const GRASP_APERTURE: f64 = 0.3;
/// Gripper-to-block distance kept while pushing.
pub const CONTACT_RADIUS: f64 = 0.05;

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    Reach,
    PushBlock,
    PressButton,
    OpenDrawer,
}

impl TaskId {
    pub const ALL: [TaskId; 4] = [
        TaskId::Reach,
        TaskId::PushBlock,
        TaskId::PressButton,
        TaskId::OpenDrawer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::Reach => "reach",
            TaskId::PushBlock => "push_block",
            TaskId::PressButton => "press_button",
            TaskId::OpenDrawer => "open_drawer",
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::usage(format!("unknown task {s:?}")))
    }
}

/// How the task's object responds to the gripper.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ObjectKind {
    /// Static marker; success when the gripper is within `tolerance`.
    Target { tolerance: f64 },
    /// Pushed by contact; success when the block is within `tolerance` of `goal`.
    Block { goal: [f64; 2], tolerance: f64 },
    /// Key point = base + articulation · axis. Success when the articulation
    /// reaches `success_at`.
    Articulated {
        axis: [f64; 2],
        limit: f64,
        success_at: f64,
    },
}

/// Closed interval; `lo == hi` means no randomization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn fixed(v: f64) -> Self {
        Range { lo: v, hi: v }
    }

    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo - EPS && v <= self.hi + EPS
    }

    /// Samples a point on the `MAX_SPEED` lattice anchored at `lo`.
    fn sample_lattice(&self, rng: &mut impl Rng) -> f64 {
        let n = ((self.hi - self.lo) / MAX_SPEED + EPS).floor() as u32;
        if n == 0 {
            return self.lo;
        }
        self.lo + MAX_SPEED * rng.random_range(0..=n) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    pub object: ObjectKind,
    pub gripper_x: Range,
    pub gripper_y: Range,
    pub object_x: Range,
    pub object_y: Range,
    pub initial_aperture: f64,
    pub horizon: usize,
}

impl TaskSpec {
    /// The registered task for `id`.
    pub fn get(id: TaskId) -> TaskSpec {
        let (object, gx, gy, ox, oy) = match id {
            TaskId::Reach => (
                ObjectKind::Target { tolerance: 0.02 },
                Range::new(0.15, 0.25),
                Range::new(0.15, 0.25),
                Range::fixed(0.6),
                Range::fixed(0.65),
            ),
            TaskId::PushBlock => (
                ObjectKind::Block {
                    goal: [0.7, 0.5],
                    tolerance: 0.05,
                },
                Range::new(0.1, 0.2),
                Range::new(0.25, 0.35),
                Range::fixed(0.45),
                Range::fixed(0.5),
            ),
            TaskId::PressButton => (
                ObjectKind::Articulated {
                    axis: [0.0, 1.0],
                    limit: 0.1,
                    success_at: 0.1,
                },
                Range::new(0.15, 0.25),
                Range::new(0.15, 0.25),
                Range::fixed(0.65),
                Range::fixed(0.8),
            ),
            TaskId::OpenDrawer => (
                ObjectKind::Articulated {
                    axis: [-1.0, 0.0],
                    limit: 0.3,
                    success_at: 0.25,
                },
                Range::new(0.1, 0.2),
                Range::new(0.7, 0.8),
                Range::fixed(0.8),
                Range::fixed(0.4),
            ),
        };
        TaskSpec {
            id,
            object,
            gripper_x: gx,
            gripper_y: gy,
            object_x: ox,
            object_y: oy,
            initial_aperture: 1.0,
            horizon: HORIZON,
        }
    }

    pub fn by_name(name: &str) -> Result<TaskSpec> {
        Ok(TaskSpec::get(name.parse()?))
    }

    /// Same task with every randomization range collapsed to its lower end.
    pub fn canonical(&self) -> TaskSpec {
        let fix = |r: Range| Range::fixed(r.lo);
        TaskSpec {
            gripper_x: fix(self.gripper_x),
            gripper_y: fix(self.gripper_y),
            object_x: fix(self.object_x),
            object_y: fix(self.object_y),
            ..self.clone()
        }
    }

    /// Position of the object's interaction point in `state`.
    pub fn key_point(&self, state: &EnvState) -> [f64; 2] {
        match self.object {
            ObjectKind::Articulated { axis, .. } => [
                state.object[0] + state.articulation * axis[0],
                state.object[1] + state.articulation * axis[1],
            ],
            _ => state.object,
        }
    }

    /// Binary task success; a pure function of the state.
    pub fn is_success(&self, state: &EnvState) -> bool {
        match self.object {
            ObjectKind::Target { tolerance } => dist(state.gripper, state.object) <= tolerance + EPS,
            ObjectKind::Block { goal, tolerance } => dist(state.object, goal) <= tolerance + EPS,
            ObjectKind::Articulated { success_at, .. } => state.articulation >= success_at - EPS,
        }
    }

    fn is_engaged(&self, state: &EnvState) -> bool {
        matches!(self.object, ObjectKind::Articulated { .. })
            && state.aperture < GRASP_APERTURE
            && dist(state.gripper, self.key_point(state)) <= GRASP_RADIUS + EPS
    }
}

/// Full simulator state. Only the environment and the oracle sequence
/// provider look inside; rewards are computed from [`encode`] output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub gripper: [f64; 2],
    pub aperture: f64,
    /// Block centre, or the base of a button/drawer/target.
    pub object: [f64; 2],
    /// Drawer opening or button depression; 0 for objects without a joint.
    pub articulation: f64,
    /// `Some(0)` while the gripper is engaged with the (single) object.
    pub held: Option<u8>,
    pub t: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvAction {
    pub velocity: [f64; 2],
    pub aperture: f64,
}

impl EnvAction {
    pub const fn new(dx: f64, dy: f64, aperture: f64) -> Self {
        EnvAction {
            velocity: [dx, dy],
            aperture,
        }
    }

    pub fn is_zero_velocity(&self) -> bool {
        self.velocity == [0.0, 0.0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: EnvState,
    pub observation: MultiViewLatent,
    /// 1.0 iff the success predicate holds in `state`.
    pub sparse: f64,
    pub done: bool,
}

/// A task instance. Value-like: all episode state lives in [`EnvState`].
#[derive(Clone, Debug)]
pub struct Env {
    task: TaskSpec,
}

impl Env {
    pub fn new(task: TaskSpec) -> Self {
        Env { task }
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn reset(&self, seed: u64) -> (EnvState, MultiViewLatent) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = &self.task;
        let state = EnvState {
            gripper: [
                t.gripper_x.sample_lattice(&mut rng),
                t.gripper_y.sample_lattice(&mut rng),
            ],
            aperture: t.initial_aperture,
            object: [
                t.object_x.sample_lattice(&mut rng),
                t.object_y.sample_lattice(&mut rng),
            ],
            articulation: 0.0,
            held: None,
            t: 0,
        };
        let obs = encode(t, &state);
        (state, obs)
    }

    pub fn is_done(&self, state: &EnvState) -> bool {
        state.t >= self.task.horizon || self.task.is_success(state)
    }

    pub fn step(&self, state: &EnvState, action: &EnvAction) -> Result<StepOutcome> {
        if self.is_done(state) {
            return Err(Error::usage("step called on a finished episode"));
        }
        let [dx, dy] = action.velocity;
        if !(dx.is_finite() && dy.is_finite() && action.aperture.is_finite()) {
            return Err(Error::usage("action has non-finite components"));
        }
        let v = [dx.clamp(-MAX_SPEED, MAX_SPEED), dy.clamp(-MAX_SPEED, MAX_SPEED)];
        let mut next = state.clone();
        next.aperture = action.aperture.clamp(0.0, 1.0);
        next.t += 1;
        next.held = None;

        match self.task.object {
            ObjectKind::Target { .. } => {
                next.gripper = clamp_ws(add(state.gripper, v));
            }
            ObjectKind::Block { .. } => {
                let g = clamp_ws(add(state.gripper, v));
                let b = state.object;
                if dist(g, b) < CONTACT_RADIUS - EPS {
                    let mut n = sub(b, state.gripper);
                    let len = norm(n);
                    if len < EPS {
                        n = v;
                    }
                    let n = scale(n, 1.0 / norm(n).max(EPS));
                    let pushed = add(g, scale(n, CONTACT_RADIUS));
                    let clamped = clamp_ws(pushed);
                    next.object = clamped;
                    // A block pinned against the wall stops the gripper too.
                    next.gripper = if clamped == pushed {
                        g
                    } else {
                        clamp_ws(sub(clamped, scale(n, CONTACT_RADIUS)))
                    };
                } else {
                    next.gripper = g;
                }
            }
            ObjectKind::Articulated { axis, limit, .. } => {
                let engaged_state = EnvState {
                    aperture: next.aperture,
                    ..state.clone()
                };
                if self.task.is_engaged(&engaged_state) {
                    let along = dot(v, axis);
                    let art = (state.articulation + along).clamp(0.0, limit);
                    let moved = art - state.articulation;
                    let perp = sub(v, scale(axis, along));
                    next.articulation = art;
                    next.gripper = clamp_ws(add(add(state.gripper, scale(axis, moved)), perp));
                    if norm(perp) < EPS {
                        next.held = Some(0);
                    }
                } else {
                    next.gripper = clamp_ws(add(state.gripper, v));
                }
            }
        }

        let success = self.task.is_success(&next);
        let done = success || next.t >= self.task.horizon;
        let observation = encode(&self.task, &next);
        Ok(StepOutcome {
            state: next,
            observation,
            sparse: if success { 1.0 } else { 0.0 },
            done,
        })
    }
}

/// Scripted proportional controller: approach, engage, manipulate.
pub fn scripted_expert(task: &TaskSpec, state: &EnvState) -> EnvAction {
    if task.is_success(state) {
        return EnvAction::new(0.0, 0.0, state.aperture);
    }
    let toward = |target: [f64; 2]| {
        let d = sub(target, state.gripper);
        [d[0].clamp(-MAX_SPEED, MAX_SPEED), d[1].clamp(-MAX_SPEED, MAX_SPEED)]
    };
    match task.object {
        ObjectKind::Target { .. } => {
            let [dx, dy] = toward(state.object);
            EnvAction::new(dx, dy, 1.0)
        }
        ObjectKind::Block { goal, .. } => {
            let b = state.object;
            let behind = [b[0] - 2.0 * CONTACT_RADIUS, b[1]];
            let aligned = (state.gripper[1] - b[1]).abs() < EPS
                && state.gripper[0] < b[0] - CONTACT_RADIUS + EPS;
            if aligned {
                // Push straight along +x until the block sits on the goal.
                let want = goal[0] - CONTACT_RADIUS - state.gripper[0];
                return EnvAction::new(want.clamp(-MAX_SPEED, MAX_SPEED), 0.0, 1.0);
            }
            let waypoint = if state.gripper[0] <= behind[0] + EPS {
                behind
            } else if (state.gripper[1] - b[1]).abs() >= 2.0 * CONTACT_RADIUS {
                [behind[0], state.gripper[1]]
            } else {
                // Sidestep away from the block before going around it.
                let side = if state.gripper[1] >= b[1] { 1.0 } else { -1.0 };
                [state.gripper[0], b[1] + side * 3.0 * CONTACT_RADIUS]
            };
            let [dx, dy] = toward(waypoint);
            EnvAction::new(dx, dy, 1.0)
        }
        ObjectKind::Articulated {
            axis, success_at, ..
        } => {
            let key = task.key_point(state);
            if dist(state.gripper, key) > EPS {
                let [dx, dy] = toward(key);
                EnvAction::new(dx, dy, 1.0)
            } else {
                let along = (success_at - state.articulation).clamp(0.0, MAX_SPEED);
                EnvAction::new(axis[0] * along, axis[1] * along, 0.0)
            }
        }
    }
}

/// Runs the scripted expert from `start` until success or the horizon.
/// Returns every visited state, `start` included.
pub fn expert_rollout(task: &TaskSpec, start: &EnvState) -> Vec<EnvState> {
    let env = Env::new(task.clone());
    let mut states = vec![start.clone()];
    let mut s = start.clone();
    while !env.is_done(&s) {
        let a = scripted_expert(task, &s);
        s = env.step(&s, &a).expect("expert steps unfinished episodes").state;
        states.push(s.clone());
    }
    states
}

// Angular frequencies of the feature kernels, in radians per workspace unit.
const POSITION_FREQ: f64 = 3.0;
const KEY_FREQ: f64 = 6.0;
const RELATIVE_FREQ: f64 = 7.0;
const APERTURE_FREQ: f64 = 0.9;

/// Cosine-product features. For `x ∈ R^d` and each sign pattern
/// `s ∈ {±1}^d` with `s_0 = +1`, emits `cos` and `sin` of `Σ s_i f_i x_i`.
/// Since `Π cos(y_i)` is the mean of `cos(Σ s_i y_i)` over sign patterns,
/// the dot product of two normalized outputs is exactly
/// `Π cos(f_i (x_i − x'_i))`. Entries past `2^d` are zero.
fn cosine_product_features<const N: usize>(x: [f64; N], freqs: [f64; N], dim: usize) -> LatentVector {
    let patterns = 1usize << (N - 1);
    debug_assert!(2 * patterns <= dim);
    let mut out = vec![0.0; dim];
    let norm = (patterns as f64).sqrt();
    for p in 0..patterns {
        let mut phase = freqs[0] * x[0];
        for i in 1..N {
            let sign = if (p >> (i - 1)) & 1 == 0 { 1.0 } else { -1.0 };
            phase += sign * freqs[i] * x[i];
        }
        out[2 * p] = phase.cos() / norm;
        out[2 * p + 1] = phase.sin() / norm;
    }
    LatentVector::new(out).expect("features are finite")
}

/// Encodes a state as `left`, `top` and `close` feature views, each of
/// dimension 16 and unit norm. Two encodings of the same view have cosine
/// `Π cos(f_i Δ_i)` over that view's inputs.
///
/// * `left` sees the gripper and the object's key point, so a drawer's
///   opening or a button's depression shows up here.
/// * `top` sees the gripper and the object's base. The articulation is
///   masked: an open and a closed drawer look the same from above.
/// * `close` sees the key point relative to the gripper plus the aperture,
///   at a finer frequency; its last eight entries are zero padding.
pub fn encode(task: &TaskSpec, state: &EnvState) -> MultiViewLatent {
    let [gx, gy] = state.gripper;
    let [kx, ky] = task.key_point(state);
    let [ox, oy] = state.object;
    let f = POSITION_FREQ;
    let left = cosine_product_features([gx, gy, kx, ky], [f, f, KEY_FREQ, KEY_FREQ], DEFAULT_DIM);
    let top = cosine_product_features([gx, gy, ox, oy], [f; 4], DEFAULT_DIM);
    let close = cosine_product_features(
        [kx - gx, ky - gy, state.aperture],
        [RELATIVE_FREQ, RELATIVE_FREQ, APERTURE_FREQ],
        DEFAULT_DIM,
    );
    MultiViewLatent::new(standard_views(), vec![left, top, close]).expect("three views")
}

/// The shared `left`/`top`/`close` view set used by every environment latent.
pub fn standard_views() -> ViewSet {
    static VIEWS: OnceLock<ViewSet> = OnceLock::new();
    VIEWS.get_or_init(ViewSet::standard).clone()
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: [f64; 2], c: f64) -> [f64; 2] {
    [a[0] * c, a[1] * c]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    norm(sub(a, b))
}

fn clamp_ws(a: [f64; 2]) -> [f64; 2] {
    [a[0].clamp(0.0, 1.0), a[1].clamp(0.0, 1.0)]
}
