//! Exact enumeration of minimal hitting sets of a family of observed sets.

use std::collections::BTreeSet;

use crate::bits;
use crate::error::{Error, Result};
use crate::model::{CoarseSet, World};

/// Largest world for which the default enumeration runs.
pub const MAX_HITTING_WORLDS: usize = 12;
/// Largest number of distinct sets for the default enumeration.
pub const MAX_HITTING_SETS: usize = 64;

/// All minimal sets of worlds intersecting every given set, by branch and
/// bound on an uncovered set per level.
pub fn minimal_hitting_sets(world: &World, sets: &[CoarseSet]) -> Result<Vec<CoarseSet>> {
    if world.n() > MAX_HITTING_WORLDS {
        return Err(Error::TooLargeForEnumeration {
            what: "minimal hitting set enumeration",
            n: world.n(),
            max: MAX_HITTING_WORLDS,
            hint: "supply candidate supports explicitly",
        });
    }
    if sets.len() > MAX_HITTING_SETS {
        return Err(Error::TooLargeForEnumeration {
            what: "minimal hitting set enumeration",
            n: sets.len(),
            max: MAX_HITTING_SETS,
            hint: "supply candidate supports explicitly",
        });
    }
    for s in sets {
        world.check_same(s.world())?;
    }
    let masks: Vec<u32> = sets.iter().map(|s| s.mask()).collect();
    let found = minimal_hitting_masks(&masks);
    found
        .into_iter()
        .map(|mask| CoarseSet::from_mask(world.clone(), mask))
        .collect()
}

pub(crate) fn minimal_hitting_masks(sets: &[u32]) -> BTreeSet<u32> {
    let mut found: BTreeSet<u32> = BTreeSet::new();
    if sets.is_empty() {
        return found;
    }
    let mut stack: Vec<u32> = vec![0];
    while let Some(current) = stack.pop() {
        // Bound: extending past an already-found minimal set only yields
        // supersets of it.
        if found.iter().any(|&m| m & !current == 0 && m != current) {
            continue;
        }
        // Branch on the smallest uncovered set.
        let uncovered = sets
            .iter()
            .filter(|&&s| s & current == 0)
            .min_by_key(|s| s.count_ones());
        match uncovered {
            None => {
                if is_minimal(current, sets) {
                    found.insert(current);
                }
            }
            Some(&u) => {
                for w in bits::iter_bits(u) {
                    stack.push(current | (1 << w));
                }
            }
        }
    }
    found
}

fn hits_all(candidate: u32, sets: &[u32]) -> bool {
    sets.iter().all(|&s| s & candidate != 0)
}

fn is_minimal(candidate: u32, sets: &[u32]) -> bool {
    bits::iter_bits(candidate).all(|w| !hits_all(candidate & !(1 << w), sets))
}
