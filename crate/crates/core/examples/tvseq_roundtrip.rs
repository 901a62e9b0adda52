//! Writes a sequence to a TVSEQ file, reads it back and re-encodes it.

use tevir::env::{Env, TaskId, TaskSpec};
use tevir::sequence::{encode_bytes, load, oracle_for_task, save};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = TaskSpec::get(TaskId::OpenDrawer);
    let (start, _) = Env::new(task.clone()).reset(0);
    let seq = oracle_for_task(&task, &start, 8)?;

    let path = std::env::temp_dir().join("tevir_example.tvsq");
    save(&seq, &path)?;
    let bytes = std::fs::read(&path)?;
    let back = load(&path)?;
    println!("{}: {} bytes, H = {}, views {:?}", path.display(), bytes.len(), back.horizon(), back.frame(0).dims());
    println!("re-encoded bytes identical: {}", encode_bytes(&back)? == bytes);

    let truncated = &bytes[..bytes.len() - 3];
    match tevir::sequence::decode(truncated) {
        Ok(_) => println!("truncated file decoded?"),
        Err(e) => println!("truncated file: {e}"),
    }
    Ok(())
}
