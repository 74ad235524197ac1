//! Shared fixtures and random-instance generators for the integration
//! suites.
#![allow(dead_code)] // each test binary uses its own subset

use coarsedata::*;
use rand::Rng;

/// The running three-world example: three distributions with their
/// coarsening tables. Index `i` in 0..3 selects the variant.
pub fn three_world() -> World {
    World::new(["w1", "w2", "w3"]).unwrap()
}

pub fn table_theta(world: &World, i: usize) -> CompleteDistribution {
    let probs = match i {
        0 => vec![0.0, 1.0, 0.0],
        1 => vec![0.5, 0.0, 0.5],
        2 => vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        _ => panic!("variant out of range"),
    };
    CompleteDistribution::new(world, probs).unwrap()
}

pub fn table_kernel(world: &World, i: usize) -> CoarseningKernel {
    let third = 1.0 / 3.0;
    let b = KernelBuilder::new(world);
    let b = match i {
        // Variants 0 and 2 share one table; variant 1 differs in the rows
        // of the outer worlds.
        0 | 2 => b
            .set("w1", &["w1"], third)
            .unwrap()
            .set("w1", &["w1", "w2"], third)
            .unwrap()
            .set("w1", &["w1", "w3"], 0.0)
            .unwrap()
            .set("w1", &["w1", "w2", "w3"], third)
            .unwrap()
            .set("w2", &["w2"], 0.0)
            .unwrap()
            .set("w2", &["w1", "w2"], third)
            .unwrap()
            .set("w2", &["w2", "w3"], third)
            .unwrap()
            .set("w2", &["w1", "w2", "w3"], third)
            .unwrap()
            .set("w3", &["w3"], third)
            .unwrap()
            .set("w3", &["w1", "w3"], 0.0)
            .unwrap()
            .set("w3", &["w2", "w3"], third)
            .unwrap()
            .set("w3", &["w1", "w2", "w3"], third)
            .unwrap(),
        1 => b
            .set("w1", &["w1"], 0.0)
            .unwrap()
            .set("w1", &["w1", "w2"], 2.0 * third)
            .unwrap()
            .set("w1", &["w1", "w3"], 0.0)
            .unwrap()
            .set("w1", &["w1", "w2", "w3"], third)
            .unwrap()
            .set("w2", &["w2"], third)
            .unwrap()
            .set("w2", &["w1", "w2"], 2.0 * third)
            .unwrap()
            .set("w2", &["w2", "w3"], 0.0)
            .unwrap()
            .set("w2", &["w1", "w2", "w3"], 0.0)
            .unwrap()
            .set("w3", &["w3"], 0.0)
            .unwrap()
            .set("w3", &["w1", "w3"], 0.0)
            .unwrap()
            .set("w3", &["w2", "w3"], 2.0 * third)
            .unwrap()
            .set("w3", &["w1", "w2", "w3"], third)
            .unwrap(),
        _ => panic!("variant out of range"),
    };
    b.build().unwrap()
}

/// One observation each of {w1,w2}, {w2,w3} and the full set.
pub fn three_point_sample(world: &World) -> ObservedSample {
    ObservedSample::new(
        world,
        vec![
            (world.set_from_labels(&["w1", "w2"]).unwrap(), 1),
            (world.set_from_labels(&["w2", "w3"]).unwrap(), 1),
            (world.full_set(), 1),
        ],
    )
    .unwrap()
}

/// The paired-binary world with six observations of the first variable,
/// three of each value of the second, and one complete observation.
pub fn paired_world() -> World {
    World::new(["AB", "AB'", "A'B", "A'B'"]).unwrap()
}

pub fn paired_sample(world: &World) -> ObservedSample {
    ObservedSample::new(
        world,
        vec![
            (world.set_from_labels(&["AB", "AB'"]).unwrap(), 6),
            (world.set_from_labels(&["AB", "A'B"]).unwrap(), 3),
            (world.set_from_labels(&["AB'", "A'B'"]).unwrap(), 3),
            (world.set_from_labels(&["A'B'"]).unwrap(), 1),
        ],
    )
    .unwrap()
}

pub fn small_world(n: usize) -> World {
    World::new((0..n).map(|i| format!("w{}", i + 1))).unwrap()
}

/// A point on the simplex with positive coordinates.
pub fn random_interior_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..n)
        .map(|_| -(rng.random_range(1e-12..1.0f64)).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    for v in &mut raw {
        *v /= total;
    }
    raw
}

/// A simplex point where some coordinates may be exactly zero.
pub fn random_sparse_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut probs = random_interior_simplex(rng, n);
        let mut any = false;
        for p in &mut probs {
            if rng.random_bool(0.3) {
                *p = 0.0;
            } else {
                any = true;
            }
        }
        if !any {
            continue;
        }
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        return probs;
    }
}

/// A simplex point with dyadic coordinates (multiples of 1/16), exact in
/// floating point.
pub fn random_dyadic_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut cells = vec![0u32; n];
        for _ in 0..16 {
            cells[rng.random_range(0..n)] += 1;
        }
        if cells.iter().filter(|&&c| c > 0).count() >= 1 {
            return cells.iter().map(|&c| c as f64 / 16.0).collect();
        }
    }
}

/// A random observed sample over a world of size `n`.
pub fn random_sample<R: Rng>(rng: &mut R, world: &World) -> ObservedSample {
    let n = world.n();
    let full = (1u32 << n) - 1;
    let distinct = rng.random_range(1..=(2 * n).min(6));
    let mut entries = Vec::new();
    for _ in 0..distinct {
        let mask = rng.random_range(1..=full);
        let indices: Vec<usize> = (0..n).filter(|&w| mask & (1 << w) != 0).collect();
        let set = world.set_of(indices).unwrap();
        entries.push((set, rng.random_range(1..=5u64)));
    }
    ObservedSample::new(world, entries).unwrap()
}

/// A random row-stochastic kernel over a sparse family.
pub fn random_kernel<R: Rng>(rng: &mut R, world: &World) -> CoarseningKernel {
    let n = world.n();
    let full = (1u32 << n) - 1;
    let mut rows: Vec<Vec<(CoarseSet, f64)>> = Vec::with_capacity(n);
    for w in 0..n {
        let bit = 1u32 << w;
        let k = rng.random_range(1..=3usize);
        let mut masks = vec![bit];
        for _ in 0..k {
            masks.push((rng.random_range(0..=full) & full) | bit);
        }
        masks.sort_unstable();
        masks.dedup();
        let weights = random_interior_simplex(rng, masks.len());
        rows.push(
            masks
                .iter()
                .zip(weights)
                .map(|(&mask, p)| {
                    let indices: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
                    (world.set_of(indices).unwrap(), p)
                })
                .collect(),
        );
    }
    CoarseningKernel::new(world, rows).unwrap()
}

/// A random partition of the zone's members into nonempty blocks.
fn random_partition<R: Rng>(rng: &mut R, members: &[usize]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &w in members {
        let choice = rng.random_range(0..=blocks.len());
        if choice == blocks.len() {
            blocks.push(vec![w]);
        } else {
            blocks[choice].push(w);
        }
    }
    blocks
}

/// A strongly coarsened-at-random kernel: a mixture of partition kernels,
/// so every member of a block shares that block's value exactly.
pub fn random_scar_kernel<R: Rng>(rng: &mut R, world: &World) -> CoarseningKernel {
    let n = world.n();
    let all: Vec<usize> = (0..n).collect();
    let k = rng.random_range(1..=3usize);
    let partitions: Vec<Vec<Vec<usize>>> = (0..k).map(|_| random_partition(rng, &all)).collect();
    let weights = random_interior_simplex(rng, k);
    // Accumulate each world's row over the partitions' blocks.
    let mut rows: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); n];
    for (partition, &weight) in partitions.iter().zip(&weights) {
        for block in partition {
            let set = world.set_of(block.iter().copied()).unwrap();
            for &w in block {
                rows[w].push((set.clone(), weight));
            }
        }
    }
    CoarseningKernel::new(world, rows).unwrap()
}

/// A weakly coarsened-at-random kernel for `theta`: block structure over
/// the positive-probability worlds, arbitrary rows elsewhere.
pub fn random_wcar_kernel<R: Rng>(rng: &mut R, theta: &CompleteDistribution) -> CoarseningKernel {
    let world = theta.world();
    let n = world.n();
    let supported: Vec<usize> = (0..n).filter(|&w| theta.prob(w) > 0.0).collect();
    let unsupported: Vec<usize> = (0..n).filter(|&w| theta.prob(w) <= 0.0).collect();
    let k = rng.random_range(1..=3usize);
    let partitions: Vec<Vec<Vec<usize>>> =
        (0..k).map(|_| random_partition(rng, &supported)).collect();
    let weights = random_interior_simplex(rng, k);
    let mut rows: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); n];
    for (partition, &weight) in partitions.iter().zip(&weights) {
        for block in partition {
            // Blocks may be enlarged by zero-probability worlds; the common
            // value only binds the supported members.
            let mut members = block.clone();
            for &z in &unsupported {
                if rng.random_bool(0.3) {
                    members.push(z);
                }
            }
            let set = world.set_of(members.iter().copied()).unwrap();
            for &w in block {
                rows[w].push((set.clone(), weight));
            }
        }
    }
    for &z in &unsupported {
        let sub = random_kernel(rng, world);
        rows[z] = sub.row(z).collect();
    }
    CoarseningKernel::new(world, rows).unwrap()
}
