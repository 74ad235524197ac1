//! Instance builders shared by the benchmarks.

use coarsedata::*;

/// A world of `n` labelled elements.
pub fn world(n: usize) -> World {
    World::new((0..n).map(|i| format!("w{}", i + 1))).expect("valid world")
}

/// A deterministic sample with `distinct` random-looking sets over `n`
/// worlds, drawn from a seeded generative pair.
pub fn synthetic_sample(n: usize, draws: u64, seed: u64) -> ObservedSample {
    let w = world(n);
    let probs: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
    let total: f64 = probs.iter().sum();
    let theta = CompleteDistribution::new(&w, probs.iter().map(|p| p / total).collect())
        .expect("valid distribution");
    // Coarsen each world to itself, a pair, or a triple.
    let rows: Vec<Vec<(CoarseSet, f64)>> = (0..n)
        .map(|i| {
            let pair = w.set_of([i, (i + 1) % n]).unwrap();
            let triple = w.set_of([i, (i + 1) % n, (i + 2) % n]).unwrap();
            vec![(w.singleton(i).unwrap(), 0.4), (pair, 0.35), (triple, 0.25)]
        })
        .collect();
    let kernel = CoarseningKernel::new(&w, rows).expect("valid kernel");
    sample_coarse(&theta, &kernel, draws, seed).expect("sampling succeeds")
}

/// The four-world fixture with an informative missingness pattern.
pub fn paired_sample() -> ObservedSample {
    let w = World::new(["AB", "AB'", "A'B", "A'B'"]).unwrap();
    ObservedSample::new(
        &w,
        vec![
            (w.set_from_labels(&["AB", "AB'"]).unwrap(), 6),
            (w.set_from_labels(&["AB", "A'B"]).unwrap(), 3),
            (w.set_from_labels(&["AB'", "A'B'"]).unwrap(), 3),
            (w.set_from_labels(&["A'B'"]).unwrap(), 1),
        ],
    )
    .unwrap()
}
