//! Resets each task and lets the scripted expert solve it.

use tevir::env::{expert_rollout, Env, TaskId, TaskSpec};

fn main() {
    for id in TaskId::ALL {
        let task = TaskSpec::get(id);
        let (start, z) = Env::new(task.clone()).reset(7);
        let path = expert_rollout(&task, &start);
        let end = path.last().unwrap();
        println!(
            "{:<13} views {:?}  start gripper {:?}  solved {} in {} steps",
            id.as_str(),
            z.dims(),
            start.gripper,
            task.is_success(end),
            path.len() - 1
        );
    }
}
