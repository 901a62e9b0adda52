use std::fs;
use std::path::{Path, PathBuf};

use tevir::agent::train_run;
use tevir::env::TaskId;
use tevir::harness::{ablate, report, run_suite, Drop, ExperimentConfig, Method};
use tevir::Error;

const SMALL: &str = r#"
name = "small"
tasks = ["reach", "press_button"]
modes = ["tevir", "sparse_only"]
seeds = [0, 1, 2]
steps = 3000
[reward]
explore_scale = 0.1
[rnd]
learning_rate = 0.001
"#;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(text).unwrap();
    cfg.out = Some(out.to_path_buf());
    cfg
}

fn csvs(dir: &Path) -> Vec<PathBuf> {
    let mut found = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                found.push(p);
            }
        }
    }
    found.sort();
    found
}

#[test]
fn grid_writes_one_csv_per_run_and_a_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(SMALL, tmp.path());
    let summary = run_suite(&cfg).unwrap();
    assert_eq!(summary.runs.len(), 12);
    assert_eq!(summary.failures().count(), 0);
    assert_eq!(csvs(tmp.path()).len(), 12);
    assert!(tmp.path().join("summary.json").is_file());
    assert!(tmp.path().join("clean/reach/tevir/seed2.csv").is_file());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sa = run_suite(&config(SMALL, a.path())).unwrap();
    let sb = run_suite(&config(SMALL, b.path())).unwrap();
    let (fa, fb) = (csvs(a.path()), csvs(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.strip_prefix(a.path()).unwrap(), y.strip_prefix(b.path()).unwrap());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
    assert_eq!(sa.runs, sb.runs);
}

#[test]
fn report_bands_and_missing_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    run_suite(&config(SMALL, tmp.path())).unwrap();
    fs::remove_file(tmp.path().join("clean/press_button/sparse_only/seed1.csv")).unwrap();
    let r = report(tmp.path()).unwrap();
    let full = r.cell("clean", "reach", "tevir").unwrap();
    assert!(full.complete());
    let band = full.curve.as_ref().unwrap();
    for i in 0..band.step.len() {
        assert!(band.min[i] <= band.median[i] && band.median[i] <= band.max[i]);
    }
    let holed = r.cell("clean", "press_button", "sparse_only").unwrap();
    assert_eq!(holed.missing_seeds, vec![1]);
    assert!(r.render().contains("clean/press_button/sparse_only missing seeds [1]"));
    assert!(tmp.path().join("report.json").is_file());
}

#[test]
fn empty_directory_reports_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let r = report(tmp.path()).unwrap();
    assert!(r.is_empty());
    assert!(r.render().contains("empty"));
    assert!(!tmp.path().join("report.json").exists());
}

#[test]
fn snr_sweep_runs_one_sub_suite_per_level() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
name = "sweep"
tasks = ["reach"]
modes = ["tevir"]
seeds = [0]
steps = 2000
[corruption]
mode = "gaussian_snr"
snr_db = [30.0, 25.0, 20.0, 15.0, 10.0]
"#;
    let summary = run_suite(&config(text, tmp.path())).unwrap();
    assert_eq!(summary.levels.len(), 5);
    assert_eq!(summary.runs.len(), 5);
    for db in ["30", "25", "20", "15", "10"] {
        assert!(tmp.path().join(format!("snr_{db}/reach/tevir/seed0.csv")).is_file(), "{db}");
    }
    let r = report(tmp.path()).unwrap();
    let columns: Vec<&str> = r.levels.iter().map(|(_, c)| c.as_str()).collect();
    assert_eq!(columns, ["30 dB", "25 dB", "20 dB", "15 dB", "10 dB"]);
    assert!(r.render().lines().nth(1).unwrap().contains("15 dB"));
}

#[test]
fn error_sweep_columns_are_percentages() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
tasks = ["reach"]
modes = ["tevir"]
seeds = [0]
steps = 1000
[corruption]
mode = "irrelevant_frames"
error_fraction = [0.0, 0.125, 0.25]
"#;
    run_suite(&config(text, tmp.path())).unwrap();
    let r = report(tmp.path()).unwrap();
    let header = r.render().lines().nth(1).unwrap().to_string();
    assert!(header.contains("12.5%"), "{header}");
}

fn traced(cfg: &ExperimentConfig, task: TaskId) -> Vec<tevir::reward::RewardBreakdown> {
    let level = &cfg.corruption.levels()[0];
    let mut spec = cfg.run_spec(task, Method::Tevir, level).unwrap();
    spec.steps = 2000;
    spec.trace_episodes = (0..10).collect();
    train_run(&spec, 0)
        .unwrap()
        .traces
        .into_iter()
        .flat_map(|t| t.breakdowns)
        .collect()
}

#[test]
fn dropping_exploration_leaves_distance_plus_progress() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let full = traced(&cfg, TaskId::PressButton);
    assert!(full.iter().any(|b| b.r_expl > 0.0));
    let dropped = traced(&cfg.with_drop(Drop::RExpl).unwrap(), TaskId::PressButton);
    for b in dropped {
        assert_eq!(b.r_expl, 0.0);
        assert_eq!(b.r_total, b.r_dist + b.r_prog);
    }
}

#[test]
fn dropping_the_close_view_changes_similarities() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let full: Vec<f64> = traced(&cfg, TaskId::OpenDrawer).iter().map(|b| b.r_dist).collect();
    let dropped = cfg.with_drop(Drop::View("close".into())).unwrap();
    let ablated: Vec<f64> = traced(&dropped, TaskId::OpenDrawer).iter().map(|b| b.r_dist).collect();
    assert_ne!(full, ablated);
}

#[test]
fn dropping_every_view_is_a_config_error() {
    let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
    let cfg = cfg
        .with_drop(Drop::View("left".into()))
        .and_then(|c| c.with_drop(Drop::View("top".into())))
        .unwrap();
    assert!(matches!(cfg.with_drop(Drop::View("close".into())), Err(Error::Config(_))));
}

#[test]
fn ablation_writes_to_its_own_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
tasks = ["reach"]
modes = ["tevir"]
seeds = [0]
steps = 1000
"#;
    let summary = ablate(&config(text, tmp.path()), Drop::RProg).unwrap();
    assert_eq!(summary.runs.len(), 1);
    assert!(tmp.path().join("ablate_r_prog/clean/reach/tevir/seed0.csv").is_file());
}

#[test]
fn unwritable_output_fails_before_any_run() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = config(SMALL, &blocker.join("out"));
    assert!(run_suite(&cfg).is_err());
}

#[test]
fn invalid_configs_fail_at_startup() {
    for text in [
        "tasks = []\nmodes = [\"tevir\"]\nsteps = 10",
        "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 0",
        "tasks = [\"lift\"]\nmodes = [\"tevir\"]\nsteps = 10",
        "tasks = [\"reach\"]\nmodes = [\"tevir\"]\nsteps = 10\n[reward]\nweights = { left = 0.0 }",
    ] {
        assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))), "{text}");
    }
}
