//! A small experiment grid with a noise sweep, then its report.

use tevir::harness::{report, run_suite, ExperimentConfig};

fn main() -> tevir::Result<()> {
    let mut cfg = ExperimentConfig::from_toml(
        r#"
name = "example_suite"
tasks = ["reach"]
modes = ["tevir", "sparse_only", "frame_follower"]
seeds = [0, 1, 2]
steps = 60000
[reward]
explore_scale = 0.1
[rnd]
learning_rate = 0.001
[corruption]
mode = "gaussian_snr"
snr_db = [30.0, 10.0]
"#,
    )?;
    let dir = std::env::temp_dir().join("tevir_example_suite");
    cfg.out = Some(dir.clone());
    let summary = run_suite(&cfg)?;
    println!("{} runs written to {}", summary.runs.len(), dir.display());
    print!("{}", report(&dir)?.render());
    Ok(())
}
