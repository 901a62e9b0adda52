//! Running a (level × task × method × seed) grid and persisting its metrics.
//!
//! Layout under the output directory:
//!
//! ```text
//! <level>/<task>/<method>/seed<k>.csv   one per run
//! summary.json                          written after every run finished
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Level, Method};
use crate::agent::{preflight, train_run, LearningCurve};
use crate::baseline::follow_run;
use crate::env::TaskId;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "step,episode,success_rolling20,r_dist_mean,r_prog_mean,r_expl_mean,M_final";
pub const SUMMARY_FILE: &str = "summary.json";
/// Caps the worker pool.
pub const THREADS_ENV: &str = "TEVIR_THREADS";

/// One cell of the grid.
#[derive(Clone, Debug)]
pub struct PlannedRun {
    pub level: Level,
    pub task: TaskId,
    pub method: Method,
    pub seed: u64,
}

impl PlannedRun {
    pub fn id(&self) -> String {
        format!("{}/{}/{}/seed{}", self.level.label, self.task, self.method, self.seed)
    }

    pub fn csv_path(&self) -> String {
        format!("{}.csv", self.id())
    }
}

/// Outcome of one run as recorded in the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub level: String,
    pub task: String,
    pub mode: String,
    pub seed: u64,
    pub csv: String,
    pub completed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub episodes: usize,
    pub steps: usize,
    pub final_success: f64,
    pub steps_to_0_5: Option<usize>,
    pub steps_to_0_9: Option<usize>,
    /// Episode counts by `M` at episode end, index 0 through `H`.
    pub m_final_histogram: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub label: String,
    pub column: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub name: String,
    pub config: ExperimentConfig,
    pub levels: Vec<LevelInfo>,
    pub runs: Vec<RunRecord>,
}

impl Summary {
    pub fn load(dir: &Path) -> Result<Summary> {
        let path = dir.join(SUMMARY_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn failures(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| !r.completed)
    }
}

/// Grid in execution order: level, task, method, seed.
pub fn plan(cfg: &ExperimentConfig) -> Vec<PlannedRun> {
    let mut runs = Vec::new();
    for level in cfg.corruption.levels() {
        for &task in &cfg.tasks {
            for &method in &cfg.modes {
                for &seed in &cfg.seeds {
                    runs.push(PlannedRun {
                        level: level.clone(),
                        task,
                        method,
                        seed,
                    });
                }
            }
        }
    }
    runs
}

/// Worker count: `TEVIR_THREADS` if set, else the machine's parallelism.
pub fn worker_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Everything that can fail before any run starts: config, sequence files,
/// hash settings, and the output directory.
fn startup(cfg: &ExperimentConfig, out: &Path) -> Result<(Vec<PlannedRun>, usize)> {
    cfg.validate()?;
    let threads = worker_threads()?;
    let runs = plan(cfg);
    for level in cfg.corruption.levels() {
        for &task in &cfg.tasks {
            let spec = cfg.run_spec(task, Method::Tevir, &level)?;
            for &seed in &cfg.seeds {
                preflight(&spec, seed)?;
            }
        }
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let probe = out.join(".write_check");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok((runs, threads))
}

/// The CSV text of a curve, schema v1.
pub fn curve_csv(curve: &LearningCurve) -> String {
    let mut s = String::with_capacity(64 * (curve.points.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in &curve.points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.step, p.episode, p.success_rolling20, p.r_dist_mean, p.r_prog_mean, p.r_expl_mean, p.m_final
        ));
    }
    s
}

fn execute(cfg: &ExperimentConfig, run: &PlannedRun) -> Result<LearningCurve> {
    let spec = cfg.run_spec(run.task, run.method, &run.level)?;
    match run.method {
        Method::FrameFollower => follow_run(&spec, run.seed, cfg.baseline_episodes),
        _ => train_run(&spec, run.seed).map(|o| o.curve),
    }
}

fn run_one(cfg: &ExperimentConfig, out: &Path, run: &PlannedRun) -> RunRecord {
    let mut record = RunRecord {
        id: run.id(),
        level: run.level.label.clone(),
        task: run.task.to_string(),
        mode: run.method.to_string(),
        seed: run.seed,
        csv: run.csv_path(),
        completed: false,
        error: None,
        episodes: 0,
        steps: 0,
        final_success: 0.0,
        steps_to_0_5: None,
        steps_to_0_9: None,
        m_final_histogram: vec![0; cfg.horizon + 1],
    };
    let written = execute(cfg, run).and_then(|curve| {
        let path = out.join(&record.csv);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, curve_csv(&curve)).map_err(|e| Error::io(&path, e))?;
        Ok(curve)
    });
    match written {
        Ok(curve) => {
            record.completed = true;
            record.episodes = curve.points.len();
            record.steps = curve.points.last().map_or(0, |p| p.step);
            record.final_success = curve.final_success();
            record.steps_to_0_5 = curve.steps_to(0.5);
            record.steps_to_0_9 = curve.steps_to(0.9);
            for p in &curve.points {
                record.m_final_histogram[p.m_final.min(cfg.horizon)] += 1;
            }
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs the whole grid in a worker pool and writes the summary after the
/// last run. A run that fails is recorded, not fatal; check
/// [`Summary::failures`].
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Summary> {
    let out = cfg.out_dir();
    let (runs, threads) = startup(cfg, &out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("worker pool: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| runs.par_iter().map(|r| run_one(cfg, &out, r)).collect());
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        name: cfg.name.clone(),
        config: cfg.clone(),
        levels: cfg
            .corruption
            .levels()
            .into_iter()
            .map(|l| LevelInfo {
                label: l.label,
                column: l.column,
            })
            .collect(),
        runs: records,
    };
    write_summary(&out, &summary)?;
    Ok(summary)
}

fn write_summary(out: &Path, summary: &Summary) -> Result<()> {
    let path = out.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(summary).map_err(|e| Error::config(e.to_string()))?;
    text.push('\n');
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))
}

/// Output directory of an ablation: `<out>/ablate_<slug>`.
pub fn ablation_dir(cfg: &ExperimentConfig, drop: &super::config::Drop) -> PathBuf {
    cfg.out_dir().join(format!("ablate_{}", drop.slug()))
}

/// Runs `cfg` with `drop` removed from the reward.
pub fn ablate(cfg: &ExperimentConfig, drop: super::config::Drop) -> Result<Summary> {
    let mut ablated = cfg.with_drop(drop.clone())?;
    ablated.out = Some(ablation_dir(cfg, &drop));
    run_suite(&ablated)
}
