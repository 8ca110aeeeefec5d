//! Seeded fixtures shared by the benchmarks.

use ils_summ::{distance_matrix, DistanceMatrix, Instance, InstanceFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Video-like instance with `n` shots and its distance matrix.
pub fn video_fixture(n: usize) -> (Instance, DistanceMatrix) {
    let inst = InstanceFamily::video_like(n)
        .sample(&mut ChaCha8Rng::seed_from_u64(n as u64), format!("video{n}"))
        .expect("family budget is feasible");
    let dm = distance_matrix(&inst);
    (inst, dm)
}

/// A batch of small instances the exact solver finishes quickly.
pub fn small_fixtures(count: usize, seed: u64) -> Vec<(Instance, DistanceMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let inst = InstanceFamily::small()
                .sample(&mut rng, format!("small{k}"))
                .expect("family budget is feasible");
            let dm = distance_matrix(&inst);
            (inst, dm)
        })
        .collect()
}
