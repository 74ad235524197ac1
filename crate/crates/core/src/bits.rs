//! Bitmask helpers for subsets of a small world.

/// Iterates the set bit positions of `mask` in increasing order.
pub(crate) fn iter_bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// All nonempty subsets of `zone`, ordered by cardinality and then by mask value.
///
/// Lazy enough for early-exit scans; callers bound the zone size.
pub(crate) fn subsets_by_size(zone: u32) -> impl Iterator<Item = u32> {
    let members: Vec<u32> = iter_bits(zone).map(|i| 1u32 << i).collect();
    let k = members.len();
    (1..=k).flat_map(move |size| {
        let members = members.clone();
        combinations(k, size)
            .map(move |combo| combo.iter().map(|&j| members[j]).fold(0, |m, b| m | b))
    })
}

/// Index combinations of size `size` out of `k`, in lexicographic order.
fn combinations(k: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if size <= k {
        Some((0..size).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // advance to the next combination
        let cur = current.as_mut().unwrap();
        let mut i = size;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if cur[i] < k - (size - i) {
                cur[i] += 1;
                for j in i + 1..size {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Lexicographic order on the increasing index sequences of two masks.
pub(crate) fn lex_cmp(a: u32, b: u32) -> std::cmp::Ordering {
    iter_bits(a).cmp(iter_bits(b))
}
