//! Gaussian noise, irrelevant frames and disordered frames applied to one
//! oracle sequence.

use tevir::env::{Env, TaskId, TaskSpec};
use tevir::latent::{multi_view_similarity, ViewWeights};
use tevir::sequence::{corrupt, oracle_for_task, CorruptionSpec, GeneratedSequence};

fn sims(clean: &GeneratedSequence, other: &GeneratedSequence) -> String {
    let w = ViewWeights::uniform(clean.views().clone());
    clean
        .frames()
        .iter()
        .zip(other.frames())
        .map(|(a, b)| format!("{:5.2}", multi_view_similarity(a, b, &w).unwrap()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> tevir::Result<()> {
    let oracle = |id| {
        let task = TaskSpec::get(id);
        let (start, _) = Env::new(task.clone()).reset(2);
        oracle_for_task(&task, &start, 8)
    };
    let seq = oracle(TaskId::Reach)?;
    let donor = oracle(TaskId::PushBlock)?;

    println!("similarity of each corrupted frame to the clean one");
    for db in [30.0, 20.0, 10.0] {
        let noisy = corrupt(&seq, &CorruptionSpec::gaussian(db, 1), None)?;
        println!("snr {db:>4} dB      {}", sims(&seq, &noisy));
    }
    for f in [0.125, 0.25] {
        let wrong = corrupt(&seq, &CorruptionSpec::irrelevant(f, 1), Some(&donor))?;
        println!("irrelevant {f:<5}  {}", sims(&seq, &wrong));
        let shuffled = corrupt(&seq, &CorruptionSpec::disordered(f, 1), None)?;
        println!("disordered {f:<5}  {}", sims(&seq, &shuffled));
    }
    Ok(())
}
