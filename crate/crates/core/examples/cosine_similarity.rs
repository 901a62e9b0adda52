//! Weighted multi-view cosine similarity.

use tevir::latent::{cosine, multi_view_similarity, LatentVector, MultiViewLatent, ViewSet, ViewWeights};

fn main() -> tevir::Result<()> {
    let a = LatentVector::new(vec![1.0, 0.0])?;
    let b = LatentVector::new(vec![1.0, 1.0])?;
    println!("cosine((1,0), (1,1)) = {:.4}", cosine(&a, &b)?);

    let views = ViewSet::standard();
    let lv = |v: [f64; 2]| LatentVector::new(v.to_vec());
    // Per-view cosines 1.0, 0.5 and 0.0.
    let z = MultiViewLatent::new(views.clone(), vec![lv([1.0, 0.0])?, lv([1.0, 0.0])?, lv([1.0, 0.0])?])?;
    let f = MultiViewLatent::new(
        views.clone(),
        vec![lv([2.0, 0.0])?, lv([0.5, 0.75f64.sqrt()])?, lv([0.0, 1.0])?],
    )?;
    let w = ViewWeights::from_pairs(views.clone(), [("left", 0.5), ("top", 0.8), ("close", 0.4)])?;
    println!("weighted similarity = {:.4}", multi_view_similarity(&z, &f, &w)?);
    println!("uniform similarity  = {:.4}", multi_view_similarity(&z, &f, &ViewWeights::uniform(views))?);
    Ok(())
}
