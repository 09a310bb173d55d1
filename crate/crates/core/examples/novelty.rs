//! Embedding-based novelty: per-period mean embeddings, one minus the highest
//! similarity to the recent past, and the high-similarity state.

use newsratio::novelty::{
    novelty_score, period_mean, read_embeddings_binary, similarity_dummy, write_embeddings_binary, EmbeddingRecord,
    Similarity,
};
use newsratio::timeseries::Period;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> newsratio::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dim = 16;
    let mut theme: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut records = Vec::new();
    for t in 0..36 {
        // every twelfth month the news moves on to a new theme
        if t % 12 == 0 {
            theme = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        }
        for k in 0..20 {
            records.push(EmbeddingRecord {
                headline_id: format!("m{t}-{k}"),
                period: Period::monthly(2019, 1).offset(t),
                vector: theme.iter().map(|x| x + rng.random_range(-0.5..0.5)).collect(),
            });
        }
    }

    // compact binary storage with a JSON sidecar
    let dir = tempfile_dir();
    let path = dir.join("embeddings.f32");
    write_embeddings_binary(&path, &records)?;
    let records = read_embeddings_binary(&path)?;

    let means = period_mean(&records)?;
    let novelty = novelty_score(&means, 6, Similarity::Pearson)?;
    let state = similarity_dummy(&means, 6, 6, Similarity::Pearson)?;
    for (i, (period, n)) in novelty.iter().enumerate() {
        let marker = if state.is_high(i) { "high similarity" } else { "" };
        println!("{period}  novelty {n:.3}  {marker}");
    }
    std::fs::remove_dir_all(dir).ok();
    Ok(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("newsratio-novelty-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
