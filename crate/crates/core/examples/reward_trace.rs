//! Per-step reward breakdown of the scripted expert following its own
//! sequence, then of a gripper that never moves.

use tevir::env::{encode, expert_rollout, Env, TaskId, TaskSpec};
use tevir::latent::ViewWeights;
use tevir::reward::{step_reward, ProgressState, RewardConfig};
use tevir::rnd::NoBonus;
use tevir::sequence::oracle_for_task;

fn main() -> tevir::Result<()> {
    let task = TaskSpec::get(TaskId::PressButton);
    let (start, _) = Env::new(task.clone()).reset(11);
    let seq = oracle_for_task(&task, &start, 8)?;
    let config = RewardConfig::new(ViewWeights::uniform(seq.views().clone()));

    let expert = expert_rollout(&task, &start);
    let idle = vec![start.clone(); expert.len()];
    for (label, states) in [("expert", expert), ("idle", idle)] {
        println!("{label}");
        println!("   t   r_dist  r_prog  r_total  h*  M");
        let mut progress = ProgressState::for_sequence(&seq);
        for (t, s) in states.iter().enumerate() {
            let (b, next) = step_reward(&encode(&task, s), &seq, &progress, &config, &mut NoBonus, None)?;
            println!(
                "{t:>4}  {:>7.3} {:>7.3}  {:>7.3}  {:>2} {:>2}",
                b.r_dist, b.r_prog, b.r_total, b.h_star, b.reached_after
            );
            progress = next;
        }
    }
    Ok(())
}
