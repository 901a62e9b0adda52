//! Experiment configuration, read from TOML.
//!
//! ```toml
//! name = "exp_noise"
//! tasks = ["reach", "press_button"]
//! modes = ["tevir", "frame_follower"]
//! seeds = [0, 1, 2]
//! steps = 200000
//!
//! [reward]
//! explore_scale = 0.1
//! weights = { left = 1.0, top = 1.0, close = 1.0 }
//!
//! [corruption]
//! mode = "gaussian_snr"
//! snr_db = [30.0, 20.0, 10.0]
//!
//! [overrides.open_drawer]
//! steps = 400000
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentConfig, RewardMode, RndConfig, RunSpec};
use crate::env::{standard_views, TaskId, TaskSpec};
use crate::error::{Error, Result};
use crate::latent::ViewWeights;
use crate::reward::{
    Components, RewardConfig, DEFAULT_ALPHA, DEFAULT_EXPLORE_CLIP, DEFAULT_EXPLORE_SCALE,
    DEFAULT_THETA,
};
use crate::sequence::{load as load_sequence, CorruptionMode, CorruptionSpec, FixedProvider, OracleProvider, SequenceProvider};

pub const DEFAULT_SEEDS: [u64; 3] = [0, 1, 2];
pub const DEFAULT_HORIZON: usize = 8;
pub const DEFAULT_BASELINE_EPISODES: usize = 20;

/// What a run trains or executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SparseOnly,
    Tevir,
    TevirPlus,
    /// The non-learning frame follower.
    FrameFollower,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::SparseOnly => "sparse_only",
            Method::Tevir => "tevir",
            Method::TevirPlus => "tevir_plus",
            Method::FrameFollower => "frame_follower",
        }
    }

    /// The training reward, or `None` for the baseline.
    pub fn reward_mode(self) -> Option<RewardMode> {
        match self {
            Method::SparseOnly => Some(RewardMode::SparseOnly),
            Method::Tevir => Some(RewardMode::Tevir),
            Method::TevirPlus => Some(RewardMode::TevirPlus),
            Method::FrameFollower => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::SparseOnly, Method::Tevir, Method::TevirPlus, Method::FrameFollower]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown mode {s:?}")))
    }
}

/// An ablation target: one reward term or one view.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Drop {
    RDist,
    RProg,
    RExpl,
    View(String),
}

impl Drop {
    /// File-system friendly name, e.g. `view_left`.
    pub fn slug(&self) -> String {
        self.to_string().replace(':', "_")
    }
}

impl fmt::Display for Drop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drop::RDist => f.write_str("r_dist"),
            Drop::RProg => f.write_str("r_prog"),
            Drop::RExpl => f.write_str("r_expl"),
            Drop::View(v) => write!(f, "view:{v}"),
        }
    }
}

impl FromStr for Drop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r_dist" => Ok(Drop::RDist),
            "r_prog" => Ok(Drop::RProg),
            "r_expl" => Ok(Drop::RExpl),
            _ => match s.strip_prefix("view:") {
                Some(v) if standard_views().index_of(v).is_some() => Ok(Drop::View(v.to_string())),
                Some(v) => Err(Error::config(format!("unknown view {v:?}"))),
                None => Err(Error::config(format!(
                    "unknown ablation {s:?} (expected r_dist, r_prog, r_expl or view:<name>)"
                ))),
            },
        }
    }
}

impl TryFrom<String> for Drop {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Drop> for String {
    fn from(d: Drop) -> String {
        d.to_string()
    }
}

/// Where reference sequences come from: `"oracle"` or `"file:<path>"`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SequenceSource {
    #[default]
    Oracle,
    File(PathBuf),
}

impl TryFrom<String> for SequenceSource {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        if s == "oracle" {
            Ok(SequenceSource::Oracle)
        } else if let Some(p) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
            Ok(SequenceSource::File(PathBuf::from(p)))
        } else {
            Err(Error::config(format!("sequence source {s:?} is neither oracle nor file:<path>")))
        }
    }
}

impl From<SequenceSource> for String {
    fn from(s: SequenceSource) -> String {
        match s {
            SequenceSource::Oracle => "oracle".into(),
            SequenceSource::File(p) => format!("file:{}", p.display()),
        }
    }
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_explore_scale() -> f64 {
    DEFAULT_EXPLORE_SCALE
}
fn default_explore_clip() -> f64 {
    DEFAULT_EXPLORE_CLIP
}
fn default_weights() -> BTreeMap<String, f64> {
    standard_views().iter().map(|v| (v.to_string(), 1.0)).collect()
}
fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}
fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_baseline_episodes() -> usize {
    DEFAULT_BASELINE_EPISODES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSection {
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_explore_scale")]
    pub explore_scale: f64,
    #[serde(default = "default_explore_clip")]
    pub explore_clip: f64,
    /// Per-view weights; views left out get weight 0.
    #[serde(default = "default_weights")]
    pub weights: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop: Vec<Drop>,
}

impl Default for RewardSection {
    fn default() -> Self {
        RewardSection {
            theta: DEFAULT_THETA,
            alpha: DEFAULT_ALPHA,
            explore_scale: DEFAULT_EXPLORE_SCALE,
            explore_clip: DEFAULT_EXPLORE_CLIP,
            weights: default_weights(),
            drop: Vec::new(),
        }
    }
}

/// Per-task settings that replace the suite-wide ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

/// A corruption sweep; each listed level becomes a sub-suite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionSweep {
    #[serde(default)]
    pub mode: CorruptionMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snr_db: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub error_fraction: Vec<f64>,
}

/// One level of a corruption sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    /// Directory-safe label: `clean`, `snr_20` or `err_0.125`.
    pub label: String,
    /// Table column header: `-`, `20 dB` or `12.5%`.
    pub column: String,
    pub spec: CorruptionSpec,
}

impl CorruptionSweep {
    pub fn levels(&self) -> Vec<Level> {
        match self.mode {
            CorruptionMode::None => vec![Level {
                label: "clean".into(),
                column: "-".into(),
                spec: CorruptionSpec::none(),
            }],
            CorruptionMode::GaussianSnr => self
                .snr_db
                .iter()
                .map(|&db| Level {
                    label: format!("snr_{db}"),
                    column: format!("{db} dB"),
                    spec: CorruptionSpec::gaussian(db, 0),
                })
                .collect(),
            CorruptionMode::IrrelevantFrames | CorruptionMode::DisorderedFrames => self
                .error_fraction
                .iter()
                .map(|&f| Level {
                    label: format!("err_{f}"),
                    column: format!("{}%", f * 100.0),
                    spec: if self.mode == CorruptionMode::IrrelevantFrames {
                        CorruptionSpec::irrelevant(f, 0)
                    } else {
                        CorruptionSpec::disordered(f, 0)
                    },
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let (needs, other, list_name) = match self.mode {
            CorruptionMode::None => {
                if !self.snr_db.is_empty() || !self.error_fraction.is_empty() {
                    return Err(Error::config("corruption levels given without a corruption mode"));
                }
                return Ok(());
            }
            CorruptionMode::GaussianSnr => (&self.snr_db, &self.error_fraction, "snr_db"),
            _ => (&self.error_fraction, &self.snr_db, "error_fraction"),
        };
        if needs.is_empty() {
            return Err(Error::config(format!("corruption mode needs a nonempty {list_name} list")));
        }
        if !other.is_empty() {
            return Err(Error::config(format!("corruption mode only takes {list_name}")));
        }
        for level in self.levels() {
            level.spec.validate().map_err(|e| Error::config(e.to_string()))?;
        }
        let mut labels: Vec<_> = self.levels().into_iter().map(|l| l.label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != needs.len() {
            return Err(Error::config(format!("duplicate {list_name} values")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub tasks: Vec<TaskId>,
    pub modes: Vec<Method>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Training steps per run.
    pub steps: usize,
    /// Key frames per reference sequence.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Episodes per frame-follower run.
    #[serde(default = "default_baseline_episodes")]
    pub baseline_episodes: usize,
    #[serde(default)]
    pub sequence: SequenceSource,
    /// Output directory; relative paths resolve against the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub reward: RewardSection,
    #[serde(default)]
    pub agent: AgentConfig,
    #[serde(default)]
    pub rnd: RndConfig,
    #[serde(default)]
    pub corruption: CorruptionSweep,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<TaskId, TaskOverride>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::config("no tasks"));
        }
        if self.modes.is_empty() {
            return Err(Error::config("no modes"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed is required"));
        }
        if self.steps == 0 {
            return Err(Error::config("steps must be positive"));
        }
        if self.horizon < 2 {
            return Err(Error::config("horizon must be at least 2"));
        }
        if self.baseline_episodes == 0 {
            return Err(Error::config("baseline_episodes must be positive"));
        }
        for list in [&self.tasks.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                     &self.modes.iter().map(|m| m.to_string()).collect(),
                     &self.seeds.iter().map(|s| s.to_string()).collect()] {
            let mut sorted = list.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != list.len() {
                return Err(Error::config(format!("duplicate entries in {list:?}")));
            }
        }
        for task in self.overrides.keys() {
            if !self.tasks.contains(task) {
                return Err(Error::config(format!("override for {task}, which is not in tasks")));
            }
        }
        if let SequenceSource::File(_) = self.sequence {
            if self.tasks.len() != 1 {
                return Err(Error::config("a sequence file serves exactly one task"));
            }
        }
        self.agent.validate()?;
        self.corruption.validate()?;
        for &task in &self.tasks {
            self.reward_config(task)?;
        }
        Ok(())
    }

    /// Output directory, `results/<name>` unless set.
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            let name = if self.name.is_empty() { "suite" } else { &self.name };
            PathBuf::from("results").join(name)
        })
    }

    pub fn steps_for(&self, task: TaskId) -> usize {
        self.overrides.get(&task).and_then(|o| o.steps).unwrap_or(self.steps)
    }

    /// Reward settings for `task`, overrides and ablations applied.
    pub fn reward_config(&self, task: TaskId) -> Result<RewardConfig> {
        let o = self.overrides.get(&task);
        let weights_map = o.and_then(|o| o.weights.as_ref()).unwrap_or(&self.reward.weights);
        let views = standard_views();
        for name in weights_map.keys() {
            if views.index_of(name).is_none() {
                return Err(Error::config(format!("unknown view {name:?} in weights")));
            }
        }
        let mut weights = ViewWeights::new(
            views.clone(),
            views
                .iter()
                .map(|v| weights_map.get(v.as_str()).copied().unwrap_or(0.0))
                .collect(),
        )
        .map_err(|e| Error::config(e.to_string()))?;
        let mut components = Components::default();
        for d in &self.reward.drop {
            match d {
                Drop::RDist => components.dist = false,
                Drop::RProg => components.prog = false,
                Drop::RExpl => components.expl = false,
                Drop::View(v) => {
                    weights = weights
                        .without_view(v)
                        .map_err(|_| Error::config("dropping every view leaves no similarity"))?
                }
            }
        }
        let cfg = RewardConfig {
            theta: o.and_then(|o| o.theta).unwrap_or(self.reward.theta),
            alpha: self.reward.alpha,
            weights,
            explore_scale: self.reward.explore_scale,
            explore_clip: self.reward.explore_clip,
            components,
        };
        cfg.validate().map_err(|e| Error::config(e.to_string()))?;
        Ok(cfg)
    }

    /// The same experiment with `drop` added to the ablations.
    pub fn with_drop(&self, drop: Drop) -> Result<Self> {
        let mut cfg = self.clone();
        if !cfg.reward.drop.contains(&drop) {
            cfg.reward.drop.push(drop);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sequence provider for `task`; a file is loaded and checked here.
    pub fn provider(&self, task: TaskId) -> Result<Arc<dyn SequenceProvider>> {
        match &self.sequence {
            SequenceSource::Oracle => Ok(Arc::new(OracleProvider)),
            SequenceSource::File(path) => {
                let seq = load_sequence(path).map_err(|e| Error::config(e.to_string()))?;
                if seq.task_id() != task.as_str() {
                    return Err(Error::config(format!(
                        "{} holds a {} sequence, suite task is {task}",
                        path.display(),
                        seq.task_id()
                    )));
                }
                if seq.horizon() != self.horizon {
                    return Err(Error::config(format!(
                        "{} has H = {}, config asks for {}",
                        path.display(),
                        seq.horizon(),
                        self.horizon
                    )));
                }
                Ok(Arc::new(FixedProvider::new(seq)))
            }
        }
    }

    /// The run settings for one grid cell. The baseline borrows the
    /// tevir spec for its resets, sequences and weights.
    pub fn run_spec(&self, task: TaskId, method: Method, level: &Level) -> Result<RunSpec> {
        Ok(RunSpec {
            task: TaskSpec::get(task),
            mode: method.reward_mode().unwrap_or(RewardMode::Tevir),
            reward: self.reward_config(task)?,
            agent: self.agent.clone(),
            rnd: self.rnd.clone(),
            steps: self.steps_for(task),
            horizon: self.horizon,
            corruption: level.spec.clone(),
            provider: self.provider(task)?,
            trace_episodes: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
tasks = ["reach"]
modes = ["tevir"]
steps = 1000
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.seeds, vec![0, 1, 2]);
        assert_eq!(cfg.horizon, 8);
        assert_eq!(cfg.reward.theta, 0.8);
        assert_eq!(cfg.sequence, SequenceSource::Oracle);
        assert_eq!(cfg.out_dir(), PathBuf::from("results/suite"));
    }

    #[test]
    fn round_trip_is_identity() {
        let text = r#"
name = "x"
tasks = ["open_drawer", "reach"]
modes = ["tevir_plus", "sparse_only", "frame_follower"]
seeds = [3, 4]
steps = 5000
sequence = "oracle"
[reward]
explore_scale = 0.1
weights = { left = 0.5, top = 0.2, close = 0.7 }
drop = ["r_expl", "view:top"]
[agent]
optimism = 0.4
[corruption]
mode = "irrelevant_frames"
error_fraction = [0.0, 0.125]
[overrides.open_drawer]
steps = 9000
theta = 0.75
"#;
        let a = ExperimentConfig::from_toml(text).unwrap();
        let b = ExperimentConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_toml().unwrap(), b.to_toml().unwrap());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            "tasks = []\nmodes = [\"tevir\"]\nsteps = 1",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 0",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\nseeds = []",
            "tasks = [\"fly\"]\nmodes = [\"tevir\"]\nsteps = 1",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\nbogus = 1",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\n[reward]\ntheta = 1.5",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\n[corruption]\nmode = \"gaussian_snr\"",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\n[reward]\ndrop = [\"view:left\", \"view:top\", \"view:close\"]",
            "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 1\nsequence = \"http://x\"",
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn drops_parse_and_apply() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let c = cfg.with_drop("r_prog".parse().unwrap()).unwrap().reward_config(TaskId::Reach).unwrap();
        assert!(!c.components.prog && c.components.dist && c.components.expl);
        let c = cfg.with_drop("view:left".parse().unwrap()).unwrap().reward_config(TaskId::Reach).unwrap();
        assert_eq!(c.weights.get("left"), Some(0.0));
        assert!("view:side".parse::<Drop>().is_err());
        assert!("r_other".parse::<Drop>().is_err());
        assert_eq!(Drop::View("left".into()).slug(), "view_left");
    }

    #[test]
    fn sweep_levels() {
        let sweep = CorruptionSweep {
            mode: CorruptionMode::GaussianSnr,
            snr_db: vec![30.0, 20.0],
            error_fraction: vec![],
        };
        let labels: Vec<_> = sweep.levels().into_iter().map(|l| l.label).collect();
        assert_eq!(labels, ["snr_30", "snr_20"]);
    }
}
