//! Synthetic inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ranksig_core::InstitutionRecord;

/// `n` institutions with sizes between 500 and 40000 papers and top shares
/// spread around 10%.
pub fn records(n: usize, seed: u64) -> Vec<InstitutionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let p: f64 = rng.random_range(500.0..40_000.0f64).round();
            let share: f64 = rng.random_range(0.04..0.2);
            InstitutionRecord::from_counts(format!("inst-{i:05}"), p, (p * share).round())
        })
        .collect()
}
