//! RND novelty falls on push_block starts the predictor trains on and stays
//! higher on an open_drawer start it never sees.

use tevir::env::{Env, TaskId, TaskSpec};
use tevir::rnd::RndState;

fn main() -> tevir::Result<()> {
    let env = Env::new(TaskSpec::get(TaskId::PushBlock));
    let seen: Vec<_> = (0..4).map(|s| env.reset(s).1).collect();
    let novel = Env::new(TaskSpec::get(TaskId::OpenDrawer)).reset(0).1;
    let mut rnd = RndState::new(seen[0].total_dim(), 0, 1e-2);

    for round in 0..=5 {
        let trained: f64 = seen.iter().map(|z| rnd.raw_error(z).unwrap()).sum::<f64>() / seen.len() as f64;
        println!(
            "after {:>4} updates: trained {:.5}  novel {:.5}",
            round * 100 * seen.len(),
            trained,
            rnd.raw_error(&novel)?
        );
        for _ in 0..100 {
            for z in &seen {
                rnd.train(z)?;
            }
        }
    }
    Ok(())
}
