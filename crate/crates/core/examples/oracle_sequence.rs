//! Key-frame sequence for one reset of a task, and how the frames relate.

use tevir::env::{Env, TaskSpec};
use tevir::latent::{multi_view_similarity, ViewWeights};
use tevir::sequence::oracle_for_task;

fn main() -> tevir::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "open_drawer".into());
    let task = TaskSpec::by_name(&name)?;
    let (start, _) = Env::new(task.clone()).reset(3);
    let seq = oracle_for_task(&task, &start, 8)?;
    let w = ViewWeights::uniform(seq.views().clone());

    println!("{} frames for {}", seq.horizon(), seq.task_id());
    println!("  h   sim(first)  sim(last)");
    for (h, f) in seq.frames().iter().enumerate() {
        println!(
            "{h:>3}   {:>9.3}  {:>9.3}",
            multi_view_similarity(f, seq.frame(0), &w)?,
            multi_view_similarity(f, seq.last(), &w)?
        );
    }
    Ok(())
}
