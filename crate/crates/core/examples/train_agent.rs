//! Trains one tabular agent and prints its learning curve.
//!
//! `cargo run --release --example train_agent -- press_button tevir 200000`

use tevir::env::TaskId;
use tevir::harness::{ExperimentConfig, Method};

fn main() -> tevir::Result<()> {
    let mut args = std::env::args().skip(1);
    let task: TaskId = args.next().unwrap_or_else(|| "reach".into()).parse()?;
    let method: Method = args.next().unwrap_or_else(|| "tevir".into()).parse()?;
    let steps: usize = args.next().map_or(60_000, |s| s.parse().expect("step count"));

    let cfg = ExperimentConfig::from_toml(&format!(
        r#"
tasks = ["{task}"]
modes = ["{method}"]
steps = {steps}
[reward]
explore_scale = 0.1
[rnd]
learning_rate = 0.001
"#
    ))?;
    let level = &cfg.corruption.levels()[0];
    let spec = cfg.run_spec(task, method, level)?;
    let out = tevir::agent::train_run(&spec, 0)?;

    let every = (out.curve.points.len() / 15).max(1);
    println!("    step  episode  success  r_dist  r_prog  M");
    for p in out.curve.points.iter().step_by(every) {
        println!(
            "{:>8}  {:>7}  {:>7.2}  {:>6.3}  {:>6.3}  {}",
            p.step, p.episode, p.success_rolling20, p.r_dist_mean, p.r_prog_mean, p.m_final
        );
    }
    println!(
        "final rolling success {:.2}, steps to 0.9: {:?}, {} table states",
        out.curve.final_success(),
        out.curve.steps_to(0.9),
        out.distinct_states
    );
    Ok(())
}
