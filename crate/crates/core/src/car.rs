//! Coarsened-at-random predicates and the compatibility relations between
//! an empirical distribution on observations and a complete-data
//! distribution.

use crate::bits;
use crate::error::{Error, Result};
use crate::flow::MaxFlow;
use crate::model::{
    CoarseSet, CoarseningKernel, CompleteDataModel, CompleteDistribution, ObservedSample,
};
use crate::simplex;

/// Default absolute tolerance for all predicate comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One witnessed failure of a pairwise-equality condition.
///
/// For the fair evidence condition `world_a == world_b` and the two values
/// are the conditional probability given the observation and the conditional
/// probability given the plain event.
#[derive(Debug, Clone, PartialEq)]
pub struct CarViolation {
    pub set: CoarseSet,
    pub world_a: usize,
    pub world_b: usize,
    pub value_a: f64,
    pub value_b: f64,
}

/// Outcome of a coarsened-at-random check.
#[derive(Debug, Clone, PartialEq)]
pub struct CarReport {
    pub holds: bool,
    pub violations: Vec<CarViolation>,
    /// Family sets excluded from the check because they have probability
    /// zero under the supplied distribution; the common coarsening value is
    /// undefined there, so they are reported rather than guessed.
    pub excluded: Vec<CoarseSet>,
}

impl CarReport {
    fn from_parts(violations: Vec<CarViolation>, excluded: Vec<CoarseSet>) -> CarReport {
        CarReport {
            holds: violations.is_empty(),
            violations,
            excluded,
        }
    }
}

/// Weak car: within every set, the coarsening probabilities of any two
/// members of positive probability agree.
pub fn is_wcar(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    tol: f64,
) -> Result<CarReport> {
    theta.world().check_same(kernel.world())?;
    let mut violations = Vec::new();
    let mut excluded = Vec::new();
    for set in kernel.family() {
        let supported: Vec<usize> = set.indices().filter(|&w| theta.prob(w) > 0.0).collect();
        if supported.is_empty() {
            excluded.push(set);
            continue;
        }
        pairwise_violations(&set, &supported, kernel, tol, &mut violations);
    }
    Ok(CarReport::from_parts(violations, excluded))
}

/// Strong car: within every set, all members' coarsening probabilities
/// agree, independent of any distribution.
pub fn is_scar(kernel: &CoarseningKernel, tol: f64) -> CarReport {
    let mut violations = Vec::new();
    for set in kernel.family() {
        let members: Vec<usize> = set.indices().collect();
        pairwise_violations(&set, &members, kernel, tol, &mut violations);
    }
    CarReport::from_parts(violations, Vec::new())
}

fn pairwise_violations(
    set: &CoarseSet,
    members: &[usize],
    kernel: &CoarseningKernel,
    tol: f64,
    out: &mut Vec<CarViolation>,
) {
    for (k, &a) in members.iter().enumerate() {
        let la = kernel.lambda_mask(a, set.mask());
        for &b in &members[k + 1..] {
            let lb = kernel.lambda_mask(b, set.mask());
            if (la - lb).abs() > tol {
                out.push(CarViolation {
                    set: set.clone(),
                    world_a: a,
                    world_b: b,
                    value_a: la,
                    value_b: lb,
                });
            }
        }
    }
}

/// Fair evidence: conditioning on the observation of `U` agrees with
/// conditioning on the event `U` wherever the observation has positive
/// probability.
pub fn fair_evidence(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    tol: f64,
) -> Result<CarReport> {
    theta.world().check_same(kernel.world())?;
    let mut violations = Vec::new();
    let mut excluded = Vec::new();
    for set in kernel.family() {
        let mask = set.mask();
        let obs_prob: f64 = bits::iter_bits(mask)
            .map(|w| theta.prob(w) * kernel.lambda_mask(w, mask))
            .sum();
        if obs_prob <= 0.0 {
            excluded.push(set);
            continue;
        }
        let event_prob = theta.prob_of_mask(mask);
        for w in bits::iter_bits(mask) {
            let given_obs = theta.prob(w) * kernel.lambda_mask(w, mask) / obs_prob;
            let given_event = theta.prob(w) / event_prob;
            if (given_obs - given_event).abs() > tol {
                violations.push(CarViolation {
                    set: set.clone(),
                    world_a: w,
                    world_b: w,
                    value_a: given_obs,
                    value_b: given_event,
                });
            }
        }
    }
    Ok(CarReport::from_parts(violations, excluded))
}

/// Verdict of the unrestricted compatibility check `m ~ P_theta`.
#[derive(Debug, Clone)]
pub struct Compatibility {
    pub compatible: bool,
    /// A coarsening kernel whose observation probabilities reproduce the
    /// empirical distribution, when one exists.
    pub witness: Option<CoarseningKernel>,
    /// A set of worlds `A` with `sum over observed U inside A of m(O_U)`
    /// exceeding `P_theta(A)`, when infeasible.
    pub violating_worlds: Option<CoarseSet>,
}

/// Decides whether some coarsening kernel routes `theta` onto the empirical
/// distribution of the sample, as a transportation-feasibility problem.
pub fn is_compatible(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
    tol: f64,
) -> Result<Compatibility> {
    theta.world().check_same(sample.world())?;
    let world = theta.world();
    let n = world.n();
    let sets: Vec<(u32, u64)> = sample.mask_counts().iter().map(|(&m, &c)| (m, c)).collect();
    let k = sets.len();
    let total = sample.total() as f64;

    // Source 0, set nodes 1..=k, world nodes k+1..=k+n, sink k+n+1.
    let mut net = MaxFlow::new(k + n + 2);
    let sink = k + n + 1;
    let mut route_edges: Vec<(usize, usize, usize)> = Vec::new(); // (edge, set idx, world)
    for (j, &(mask, count)) in sets.iter().enumerate() {
        net.add_edge(0, 1 + j, count as f64 / total);
        for w in bits::iter_bits(mask) {
            if theta.prob(w) > 0.0 {
                let e = net.add_edge(1 + j, 1 + k + w, 2.0);
                route_edges.push((e, j, w));
            }
        }
    }
    for w in 0..n {
        if theta.prob(w) > 0.0 {
            net.add_edge(1 + k + w, sink, theta.prob(w));
        }
    }
    let flow = net.max_flow(0, sink);

    if 1.0 - flow <= tol {
        // Rows of positive-probability worlds from the routed mass; worlds
        // of probability zero report their own singleton.
        let mut rows: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); n];
        let mut row_sums = vec![0.0; n];
        for &(e, j, w) in &route_edges {
            let x = net.flow_on(e);
            if x > 0.0 {
                let lambda = (x / theta.prob(w)).clamp(0.0, 1.0);
                rows[w].push((sample.set(sets[j].0), lambda));
                row_sums[w] += lambda;
            }
        }
        for w in 0..n {
            if theta.prob(w) <= 0.0 {
                rows[w].push((world.singleton(w)?, 1.0));
            } else if row_sums[w] < 1.0 {
                // Rounding slack; fold it into the largest routed set.
                if let Some(last) = rows[w].last_mut() {
                    last.1 += 1.0 - row_sums[w];
                } else {
                    rows[w].push((world.singleton(w)?, 1.0));
                }
            }
        }
        let witness = CoarseningKernel::new(world, rows).ok();
        Ok(Compatibility {
            compatible: true,
            witness,
            violating_worlds: None,
        })
    } else {
        // The source side of the minimum cut yields a violated subset.
        let reach = net.reachable(0);
        let mut mask = 0u32;
        for w in 0..n {
            if theta.prob(w) <= 0.0 || reach[1 + k + w] {
                mask |= 1 << w;
            }
        }
        let violating = CoarseSet::from_mask(world.clone(), mask).ok();
        Ok(Compatibility {
            compatible: false,
            witness: None,
            violating_worlds: violating,
        })
    }
}

/// Per-world sums `sum over observed U containing w of m(O_U) / P_theta(U)`.
///
/// Returns the sums plus the first observed set with probability zero, if
/// any (the sums involving it are reported as infinite).
pub(crate) fn world_sums(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
) -> (Vec<f64>, Option<CoarseSet>) {
    let n = theta.world().n();
    let mut sums = vec![0.0; n];
    let mut zero_set = None;
    for (&mask, &count) in sample.mask_counts() {
        let p = theta.prob_of_mask(mask);
        let m = count as f64 / sample.total() as f64;
        if p <= 0.0 {
            zero_set.get_or_insert_with(|| sample.set(mask));
            for w in bits::iter_bits(mask) {
                sums[w] = f64::INFINITY;
            }
            continue;
        }
        for w in bits::iter_bits(mask) {
            sums[w] += m / p;
        }
    }
    (sums, zero_set)
}

/// Verdict of the weak-car compatibility check `m ~_{w-car} P_theta`.
#[derive(Debug, Clone)]
pub struct WcarCompatibility {
    pub compatible: bool,
    /// Diagnostic per-world sums `sum_{U: w in U} m(O_U) / P_theta(U)`.
    pub world_sums: Vec<f64>,
    /// First observed set with probability zero, if any.
    pub zero_probability_set: Option<CoarseSet>,
}

/// Weak-car compatibility: every observed set has positive probability and
/// every positive-probability world's sum equals one.
pub fn is_wcar_compatible(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
    tol: f64,
) -> Result<WcarCompatibility> {
    theta.world().check_same(sample.world())?;
    let (sums, zero_set) = world_sums(sample, theta);
    let mut ok = zero_set.is_none();
    if ok {
        for (w, &s) in sums.iter().enumerate() {
            if theta.prob(w) > 0.0 && (s - 1.0).abs() > tol {
                ok = false;
                break;
            }
        }
    }
    Ok(WcarCompatibility {
        compatible: ok,
        world_sums: sums,
        zero_probability_set: zero_set,
    })
}

/// Why a strong-car compatibility check failed.
#[derive(Debug, Clone, PartialEq)]
pub enum ScarObstruction {
    /// An observed set has probability zero under the distribution.
    ZeroProbabilityObserved(CoarseSet),
    /// A positive-probability world's sum differs from one.
    SupportedSumOff { world: usize, sum: f64 },
    /// A zero-probability world's sum exceeds one.
    UnsupportedSumExceeds { world: usize, sum: f64 },
    /// No unobserved set disjoint from the support could absorb a world's
    /// slack, and the feasibility solver also found no assignment.
    Infeasible { world: usize },
}

/// Verdict of the strong-car compatibility check `m ~_{s-car} P_theta`.
#[derive(Debug, Clone)]
pub struct ScarCompatibility {
    pub compatible: bool,
    pub world_sums: Vec<f64>,
    /// A strongly coarsened-at-random witness kernel, when available.
    pub witness: Option<CoarseningKernel>,
    pub obstruction: Option<ScarObstruction>,
}

/// Strong-car compatibility: a single set-indexed coarsening vector must
/// reproduce the empirical distribution while every world's total equals
/// one. Decided by the closed per-world conditions with a linear
/// feasibility solve as fallback for degenerate slack structure.
pub fn is_scar_compatible(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
    tol: f64,
) -> Result<ScarCompatibility> {
    theta.world().check_same(sample.world())?;
    let world = theta.world();
    let n = world.n();
    let (sums, zero_set) = world_sums(sample, theta);
    let fail = |obstruction: ScarObstruction, sums: Vec<f64>| ScarCompatibility {
        compatible: false,
        world_sums: sums,
        witness: None,
        obstruction: Some(obstruction),
    };

    if let Some(set) = zero_set {
        return Ok(fail(ScarObstruction::ZeroProbabilityObserved(set), sums));
    }
    for w in 0..n {
        if theta.prob(w) > 0.0 {
            if (sums[w] - 1.0).abs() > tol {
                return Ok(fail(
                    ScarObstruction::SupportedSumOff {
                        world: w,
                        sum: sums[w],
                    },
                    sums,
                ));
            }
        } else if sums[w] > 1.0 + tol {
            return Ok(fail(
                ScarObstruction::UnsupportedSumExceeds {
                    world: w,
                    sum: sums[w],
                },
                sums,
            ));
        }
    }

    // Forced common values on observed sets, slack on unobserved sets
    // disjoint from the support, scanned in increasing size.
    let positive_mask: u32 = (0..n)
        .filter(|&w| theta.prob(w) > 0.0)
        .fold(0, |m, w| m | (1 << w));
    let zone = world.full_mask() & !positive_mask;
    let mut slack_rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    let mut degenerate = None;
    for w in 0..n {
        if theta.prob(w) > 0.0 {
            continue;
        }
        let deficit = 1.0 - sums[w];
        if deficit <= tol {
            continue;
        }
        let bit = 1u32 << w;
        let slack = bits::subsets_by_size(zone)
            .filter(|&s| s & bit != 0)
            .find(|s| !sample.mask_counts().contains_key(s));
        match slack {
            Some(s) => slack_rows[w].push((s, deficit)),
            None => {
                degenerate = Some(w);
                break;
            }
        }
    }

    if let Some(w) = degenerate {
        // Degenerate slack structure: fall back to a full feasibility solve.
        return Ok(if scar_compatible_lp(sample, theta) {
            ScarCompatibility {
                compatible: true,
                world_sums: sums,
                witness: None,
                obstruction: None,
            }
        } else {
            fail(ScarObstruction::Infeasible { world: w }, sums)
        });
    }

    // Assemble the witness: common values on observed sets shared by every
    // member, private slack sets for zero-probability worlds.
    let mut rows: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); n];
    for (&mask, &count) in sample.mask_counts() {
        let lambda = (count as f64 / sample.total() as f64) / theta.prob_of_mask(mask);
        let lambda = lambda.clamp(0.0, 1.0);
        for w in bits::iter_bits(mask) {
            rows[w].push((sample.set(mask), lambda));
        }
    }
    for (w, extra) in slack_rows.into_iter().enumerate() {
        for (mask, v) in extra {
            rows[w].push((CoarseSet::from_mask(world.clone(), mask)?, v));
        }
    }
    // Zero-probability worlds with exact-zero deficit may still need padding
    // when their sums were within tolerance but not exact.
    for w in 0..n {
        let sum: f64 = rows[w].iter().map(|(_, v)| v).sum();
        if rows[w].is_empty() {
            rows[w].push((world.singleton(w)?, 1.0));
        } else if theta.prob(w) <= 0.0 && (sum - 1.0).abs() > 1e-12 && sum < 1.0 {
            let singleton = world.singleton(w)?;
            if let Some(entry) = rows[w].iter_mut().find(|(s, _)| *s == singleton) {
                entry.1 += 1.0 - sum;
            } else if !sample.mask_counts().contains_key(&(1u32 << w)) {
                rows[w].push((singleton, 1.0 - sum));
            }
        }
    }
    let witness = CoarseningKernel::new(world, rows).ok();
    Ok(ScarCompatibility {
        compatible: true,
        world_sums: sums,
        witness,
        obstruction: None,
    })
}

/// Independent linear-feasibility route for strong-car compatibility: solve
/// for nonnegative set-indexed values meeting the defining equations
/// directly. Used as the fallback path and for cross-checking.
pub fn scar_compatible_lp(sample: &ObservedSample, theta: &CompleteDistribution) -> bool {
    let world = theta.world();
    let n = world.n();
    let observed: Vec<u32> = sample.mask_counts().keys().copied().collect();
    let positive_mask: u32 = (0..n)
        .filter(|&w| theta.prob(w) > 0.0)
        .fold(0, |m, w| m | (1 << w));
    let zone = world.full_mask() & !positive_mask;
    let slack_sets: Vec<u32> = bits::subsets_by_size(zone)
        .filter(|s| !sample.mask_counts().contains_key(s))
        .take(256)
        .collect();

    let vars = observed.len() + slack_sets.len();
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    // Observation equations: P(U) * lambda_U = m(O_U).
    for (j, &mask) in observed.iter().enumerate() {
        let mut row = vec![0.0; vars];
        row[j] = theta.prob_of_mask(mask);
        a.push(row);
        b.push(sample.weight(&sample.set(mask)));
    }
    // Row-sum equations: each world's covering values total one.
    for w in 0..n {
        let bit = 1u32 << w;
        let mut row = vec![0.0; vars];
        for (j, &mask) in observed.iter().enumerate() {
            if mask & bit != 0 {
                row[j] = 1.0;
            }
        }
        for (j, &mask) in slack_sets.iter().enumerate() {
            if mask & bit != 0 {
                row[observed.len() + j] = 1.0;
            }
        }
        a.push(row);
        b.push(1.0);
    }
    simplex::feasible_point(&a, &b).is_some()
}

/// Result of trying to extend a weak-car pair to a strong-car kernel.
#[derive(Debug, Clone)]
pub enum ScarExtension {
    /// A strong-car kernel agreeing with the original on every row of a
    /// positive-probability world.
    Extended(CoarseningKernel),
    /// No extension exists: this world's forced values already sum past one.
    Infeasible { world: usize, required_sum: f64 },
}

/// Attempts to turn a weak-car pair into a strong-car kernel by re-choosing
/// the coarsening probabilities of zero-probability worlds.
pub fn extend_wcar_to_scar(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    tol: f64,
) -> Result<ScarExtension> {
    let report = is_wcar(theta, kernel, tol)?;
    if !report.holds {
        return Err(Error::NotWcar);
    }
    let world = theta.world();
    let n = world.n();

    // Common value per family set meeting the support, read off any
    // positive-probability member.
    let mut common: Vec<(u32, f64)> = Vec::new();
    for mask in kernel.family_masks() {
        if let Some(w) = bits::iter_bits(mask).find(|&w| theta.prob(w) > 0.0) {
            common.push((mask, kernel.lambda_mask(w, mask)));
        }
    }

    let mut rows: Vec<Vec<(CoarseSet, f64)>> = vec![Vec::new(); n];
    for w in 0..n {
        if theta.prob(w) > 0.0 {
            rows[w] = kernel.row(w).collect();
            continue;
        }
        let bit = 1u32 << w;
        let mut forced = 0.0;
        for &(mask, value) in &common {
            if mask & bit != 0 {
                if value > 0.0 {
                    rows[w].push((CoarseSet::from_mask(world.clone(), mask)?, value));
                }
                forced += value;
            }
        }
        if forced > 1.0 + tol {
            return Ok(ScarExtension::Infeasible {
                world: w,
                required_sum: forced,
            });
        }
        if forced < 1.0 {
            rows[w].push((world.singleton(w)?, 1.0 - forced));
        }
    }
    Ok(ScarExtension::Extended(CoarseningKernel::new(world, rows)?))
}

/// The three built-in coarsening model classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseningClass {
    Saturated,
    WCar,
    SCar,
}

/// Whether the coarse data model built from a coarsening class and a
/// complete-data model factors as a product of its two parameter spaces.
///
/// The saturated and strong-car classes always do. The weak-car class does
/// exactly when all strata of the complete-data model share one support.
pub fn classify_pd(class: CoarseningClass, model: &CompleteDataModel) -> bool {
    match class {
        CoarseningClass::Saturated | CoarseningClass::SCar => true,
        CoarseningClass::WCar => match model {
            CompleteDataModel::FixedSupport { .. } => true,
            CompleteDataModel::Saturated { world } => world.n() == 1,
            CompleteDataModel::PairedBinary { .. } => false,
        },
    }
}

/// Exhaustive subset check of the routing condition: every subset `A` of
/// worlds must satisfy `sum of m over observed sets inside A <= P_theta(A)`.
/// Exponential in `n`; intended as an oracle for small worlds.
pub fn compatible_exhaustive(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
    tol: f64,
) -> Result<bool> {
    theta.world().check_same(sample.world())?;
    let n = theta.world().n();
    if n > 20 {
        return Err(Error::TooLargeForEnumeration {
            what: "the exhaustive subset check",
            n,
            max: 20,
            hint: "use is_compatible",
        });
    }
    let full = theta.world().full_mask();
    for a in 1..=full {
        let mass: f64 = sample
            .mask_counts()
            .iter()
            .filter(|(&mask, _)| mask & !a == 0)
            .map(|(_, &c)| c as f64 / sample.total() as f64)
            .sum();
        if mass > theta.prob_of_mask(a) + tol {
            return Ok(false);
        }
    }
    Ok(true)
}
