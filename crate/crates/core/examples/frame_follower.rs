//! The non-learning frame follower on clean and noisy sequences.

use tevir::baseline::follow_run;
use tevir::env::TaskId;
use tevir::harness::{ExperimentConfig, Method};

fn main() -> tevir::Result<()> {
    let cfg = ExperimentConfig::from_toml(
        r#"
tasks = ["reach", "press_button", "open_drawer"]
modes = ["frame_follower"]
steps = 1
[corruption]
mode = "gaussian_snr"
snr_db = [30.0, 20.0, 10.0]
"#,
    )?;
    for task in [TaskId::Reach, TaskId::PressButton, TaskId::OpenDrawer] {
        let mut line = format!("{:<13}", task.as_str());
        for level in cfg.corruption.levels() {
            let spec = cfg.run_spec(task, Method::FrameFollower, &level)?;
            let curve = follow_run(&spec, 0, 20)?;
            line += &format!("  {}: {:.2}", level.column, curve.final_success());
        }
        println!("{line}");
    }
    Ok(())
}
