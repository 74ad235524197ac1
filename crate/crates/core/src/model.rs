//! Domain types: worlds, coarse sets, observed samples, complete-data
//! distributions, coarsening kernels and built-in complete-data models.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::bits;
use crate::error::{Error, Result};

/// Largest supported number of worlds; sets are stored as `u32` bitmasks.
pub const MAX_WORLDS: usize = 30;

/// Largest `n` for which operations may enumerate all subsets of the world.
pub const MAX_ENUMERATION_WORLDS: usize = 20;

/// Tolerance used when validating that probabilities sum to one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug)]
struct WorldInner {
    labels: Vec<String>,
}

/// A finite, ordered complete-data space.
///
/// The label order is fixed at construction and shared by every value built
/// on top of the world (sets, samples, distributions, kernels).
#[derive(Debug, Clone)]
pub struct World(Arc<WorldInner>);

impl World {
    pub fn new<I, S>(labels: I) -> Result<World>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyWorld);
        }
        if labels.len() > MAX_WORLDS {
            return Err(Error::TooManyWorlds {
                n: labels.len(),
                max: MAX_WORLDS,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidInput("world labels must be non-empty".into()));
            }
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(World(Arc::new(WorldInner { labels })))
    }

    pub fn n(&self) -> usize {
        self.0.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    /// The set containing every world.
    pub fn full_set(&self) -> CoarseSet {
        CoarseSet {
            world: self.clone(),
            mask: self.full_mask(),
        }
    }

    pub fn singleton(&self, index: usize) -> Result<CoarseSet> {
        self.check_index(index)?;
        Ok(CoarseSet {
            world: self.clone(),
            mask: 1 << index,
        })
    }

    /// Builds a set from world indices.
    pub fn set_of<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<CoarseSet> {
        let mut mask = 0u32;
        for i in indices {
            self.check_index(i)?;
            mask |= 1 << i;
        }
        CoarseSet::from_mask(self.clone(), mask)
    }

    /// Builds a set from labels.
    pub fn set_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<CoarseSet> {
        let mut mask = 0u32;
        for l in labels {
            let i = self
                .index_of(l.as_ref())
                .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        CoarseSet::from_mask(self.clone(), mask)
    }

    pub(crate) fn full_mask(&self) -> u32 {
        if self.n() == 32 {
            u32::MAX
        } else {
            (1u32 << self.n()) - 1
        }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::WorldIndexOutOfRange { index, n: self.n() })
        }
    }

    pub(crate) fn check_same(&self, other: &World) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::WorldMismatch)
        }
    }
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for World {}

impl PartialOrd for World {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for World {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            std::cmp::Ordering::Equal
        } else {
            self.0.labels.cmp(&other.0.labels)
        }
    }
}

impl std::hash::Hash for World {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.labels.hash(state);
    }
}

/// A nonempty subset of a world, used both as an event in the world and as
/// the observation that exactly this set was reported.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoarseSet {
    world: World,
    mask: u32,
}

impl CoarseSet {
    pub(crate) fn from_mask(world: World, mask: u32) -> Result<CoarseSet> {
        if mask == 0 {
            return Err(Error::EmptySet);
        }
        if mask & !world.full_mask() != 0 {
            return Err(Error::WorldIndexOutOfRange {
                index: 31 - mask.leading_zeros() as usize,
                n: world.n(),
            });
        }
        Ok(CoarseSet { world, mask })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub(crate) fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.world.n() && self.mask & (1 << index) != 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        bits::iter_bits(self.mask)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.world.label(i)).collect()
    }

    pub fn is_subset_of(&self, other: &CoarseSet) -> bool {
        self.world == other.world && self.mask & !other.mask == 0
    }

    pub fn intersects(&self, other: &CoarseSet) -> bool {
        self.world == other.world && self.mask & other.mask != 0
    }

    pub fn union(&self, other: &CoarseSet) -> Result<CoarseSet> {
        self.world.check_same(&other.world)?;
        CoarseSet::from_mask(self.world.clone(), self.mask | other.mask)
    }

    pub fn intersection(&self, other: &CoarseSet) -> Result<CoarseSet> {
        self.world.check_same(&other.world)?;
        CoarseSet::from_mask(self.world.clone(), self.mask & other.mask)
    }
}

impl PartialOrd for CoarseSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoarseSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.world
            .cmp(&other.world)
            .then(self.mask.cmp(&other.mask))
    }
}

impl fmt::Display for CoarseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

/// A multiset of observed coarse sets with positive counts.
///
/// Induces the empirical distribution `m(O_U) = count(U) / N` over the
/// distinct observed sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedSample {
    world: World,
    counts: BTreeMap<u32, u64>,
    total: u64,
}

impl ObservedSample {
    /// Builds a sample from `(set, count)` pairs. Counts of zero are dropped;
    /// repeated sets accumulate.
    pub fn new<I: IntoIterator<Item = (CoarseSet, u64)>>(
        world: &World,
        entries: I,
    ) -> Result<ObservedSample> {
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for (set, count) in entries {
            world.check_same(set.world())?;
            if count == 0 {
                continue;
            }
            *counts.entry(set.mask()).or_insert(0) += count;
            total += count;
        }
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Ok(ObservedSample {
            world: world.clone(),
            counts,
            total,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Total number of observations `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct observed sets.
    pub fn distinct_count(&self) -> usize {
        self.counts.len()
    }

    /// Distinct observed sets with their counts, in mask order.
    pub fn distinct(&self) -> impl Iterator<Item = (CoarseSet, u64)> + '_ {
        self.counts.iter().map(move |(&mask, &c)| {
            (
                CoarseSet {
                    world: self.world.clone(),
                    mask,
                },
                c,
            )
        })
    }

    pub fn count(&self, set: &CoarseSet) -> u64 {
        if set.world() != &self.world {
            return 0;
        }
        self.counts.get(&set.mask()).copied().unwrap_or(0)
    }

    /// Empirical weight `m(O_U)`.
    pub fn weight(&self, set: &CoarseSet) -> f64 {
        self.count(set) as f64 / self.total as f64
    }

    /// Distinct observed sets containing world `index`.
    pub fn sets_containing(&self, index: usize) -> impl Iterator<Item = (CoarseSet, u64)> + '_ {
        let bit = 1u32 << index;
        self.counts
            .iter()
            .filter(move |(&mask, _)| mask & bit != 0)
            .map(move |(&mask, &c)| {
                (
                    CoarseSet {
                        world: self.world.clone(),
                        mask,
                    },
                    c,
                )
            })
    }

    /// The same sample with every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Result<ObservedSample> {
        if k == 0 {
            return Err(Error::EmptySample);
        }
        Ok(ObservedSample {
            world: self.world.clone(),
            counts: self.counts.iter().map(|(&m, &c)| (m, c * k)).collect(),
            total: self.total * k,
        })
    }

    pub(crate) fn mask_counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    pub(crate) fn set(&self, mask: u32) -> CoarseSet {
        CoarseSet {
            world: self.world.clone(),
            mask,
        }
    }
}

/// A probability distribution over a world.
///
/// The support threshold controls which components count as supported;
/// it defaults to zero so that support is a matter of exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CompleteDistribution {
    world: World,
    probs: Vec<f64>,
    support_threshold: f64,
}

impl CompleteDistribution {
    pub fn new(world: &World, probs: Vec<f64>) -> Result<CompleteDistribution> {
        if probs.len() != world.n() {
            return Err(Error::WrongParamCount {
                expected: world.n(),
                got: probs.len(),
            });
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::NotAProbability(p));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(CompleteDistribution {
            world: world.clone(),
            probs,
            support_threshold: 0.0,
        })
    }

    /// Point mass on a single world.
    pub fn point_mass(world: &World, index: usize) -> Result<CompleteDistribution> {
        let mut probs = vec![0.0; world.n()];
        *probs.get_mut(index).ok_or(Error::WorldIndexOutOfRange {
            index,
            n: world.n(),
        })? = 1.0;
        CompleteDistribution::new(world, probs)
    }

    /// Uniform distribution over the members of `support`, exact zeros elsewhere.
    pub fn uniform_on(support: &CoarseSet) -> CompleteDistribution {
        let world = support.world().clone();
        let k = support.len() as f64;
        let mut probs = vec![0.0; world.n()];
        for i in support.indices() {
            probs[i] = 1.0 / k;
        }
        CompleteDistribution {
            world,
            probs,
            support_threshold: 0.0,
        }
    }

    /// Replaces the support threshold; must be nonnegative and leave at
    /// least one supported world.
    pub fn with_support_threshold(mut self, threshold: f64) -> Result<CompleteDistribution> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::NotAProbability(threshold));
        }
        self.support_threshold = threshold;
        if self.support_mask() == 0 {
            return Err(Error::EmptySupport);
        }
        Ok(self)
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support_threshold(&self) -> f64 {
        self.support_threshold
    }

    pub fn is_supported(&self, index: usize) -> bool {
        self.probs[index] > self.support_threshold
    }

    pub(crate) fn support_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.support_threshold {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// The set of supported worlds, recomputed from the current values.
    pub fn support(&self) -> CoarseSet {
        CoarseSet {
            world: self.world.clone(),
            mask: self.support_mask(),
        }
    }

    /// `P_theta(U)`, the total probability of the members of `U`.
    pub fn prob_of_set(&self, set: &CoarseSet) -> Result<f64> {
        self.world.check_same(set.world())?;
        Ok(set.indices().map(|i| self.probs[i]).sum())
    }

    pub(crate) fn prob_of_mask(&self, mask: u32) -> f64 {
        bits::iter_bits(mask).map(|i| self.probs[i]).sum()
    }
}

/// A coarsening process: per-world conditional distributions over the sets
/// containing that world, sparse over a declared family. Sets absent from a
/// row carry probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseningKernel {
    world: World,
    rows: Vec<BTreeMap<u32, f64>>,
}

impl CoarseningKernel {
    /// Builds a kernel from per-world rows of `(set, probability)` pairs.
    pub fn new(world: &World, rows: Vec<Vec<(CoarseSet, f64)>>) -> Result<CoarseningKernel> {
        if rows.len() != world.n() {
            return Err(Error::WrongParamCount {
                expected: world.n(),
                got: rows.len(),
            });
        }
        let mut stored = Vec::with_capacity(world.n());
        for (w, row) in rows.into_iter().enumerate() {
            let mut map = BTreeMap::new();
            let mut sum = 0.0;
            for (set, p) in row {
                world.check_same(set.world())?;
                if !set.contains(w) {
                    return Err(Error::SetMissingWorld {
                        world: world.label(w).to_string(),
                        set: set.to_string(),
                    });
                }
                if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                    return Err(Error::NotAProbability(p));
                }
                sum += p;
                *map.entry(set.mask()).or_insert(0.0) += p;
            }
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::RowNotNormalized {
                    world: world.label(w).to_string(),
                    sum,
                });
            }
            stored.push(map);
        }
        Ok(CoarseningKernel {
            world: world.clone(),
            rows: stored,
        })
    }

    /// The kernel that reports every world as its own singleton.
    pub fn identity(world: &World) -> CoarseningKernel {
        let rows = (0..world.n())
            .map(|w| BTreeMap::from([(1u32 << w, 1.0)]))
            .collect();
        CoarseningKernel {
            world: world.clone(),
            rows,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// `lambda_{w,U}`; zero for sets absent from the row.
    pub fn lambda(&self, world_index: usize, set: &CoarseSet) -> f64 {
        if set.world() != &self.world {
            return 0.0;
        }
        self.lambda_mask(world_index, set.mask())
    }

    pub(crate) fn lambda_mask(&self, world_index: usize, mask: u32) -> f64 {
        self.rows[world_index].get(&mask).copied().unwrap_or(0.0)
    }

    /// The row of a world: sets with declared (possibly zero) probability.
    pub fn row(&self, world_index: usize) -> impl Iterator<Item = (CoarseSet, f64)> + '_ {
        self.rows[world_index].iter().map(move |(&mask, &p)| {
            (
                CoarseSet {
                    world: self.world.clone(),
                    mask,
                },
                p,
            )
        })
    }

    /// Union of all sets appearing in any row, in mask order.
    pub fn family(&self) -> Vec<CoarseSet> {
        self.family_masks()
            .into_iter()
            .map(|mask| CoarseSet {
                world: self.world.clone(),
                mask,
            })
            .collect()
    }

    pub(crate) fn family_masks(&self) -> Vec<u32> {
        let mut masks: Vec<u32> = self.rows.iter().flat_map(|r| r.keys().copied()).collect();
        masks.sort_unstable();
        masks.dedup();
        masks
    }
}

/// Builder for sparse kernels addressed by labels.
pub struct KernelBuilder {
    world: World,
    rows: Vec<Vec<(CoarseSet, f64)>>,
}

impl KernelBuilder {
    pub fn new(world: &World) -> KernelBuilder {
        KernelBuilder {
            world: world.clone(),
            rows: vec![Vec::new(); world.n()],
        }
    }

    pub fn set(mut self, world_label: &str, set_labels: &[&str], p: f64) -> Result<KernelBuilder> {
        let w = self
            .world
            .index_of(world_label)
            .ok_or_else(|| Error::UnknownLabel(world_label.to_string()))?;
        let set = self.world.set_from_labels(set_labels)?;
        self.rows[w].push((set, p));
        Ok(self)
    }

    pub fn build(self) -> Result<CoarseningKernel> {
        CoarseningKernel::new(&self.world, self.rows)
    }
}

/// `P_{theta,lambda}(O_U)`: probability that exactly `U` is observed.
pub fn joint_obs_prob(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    set: &CoarseSet,
) -> Result<f64> {
    theta.world().check_same(kernel.world())?;
    theta.world().check_same(set.world())?;
    Ok(joint_obs_prob_mask(theta, kernel, set.mask()))
}

pub(crate) fn joint_obs_prob_mask(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    mask: u32,
) -> f64 {
    bits::iter_bits(mask)
        .map(|w| theta.prob(w) * kernel.lambda_mask(w, mask))
        .sum()
}

/// Describes one support stratum of a complete-data model.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportStratum {
    pub support: CoarseSet,
    pub region: StratumRegion,
}

/// The parameter sub-region carving out a stratum.
#[derive(Debug, Clone, PartialEq)]
pub enum StratumRegion {
    /// All distributions whose support is exactly the stratum's set.
    SupportExactly,
    /// A box in parameter coordinates: each axis either free in (0,1) or pinned.
    ParamBox(Vec<AxisRange>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisRange {
    Open01,
    Fixed(f64),
}

/// Built-in complete-data model families.
#[derive(Debug, Clone, PartialEq)]
pub enum CompleteDataModel {
    /// Every distribution on the world; `n - 1` free parameters.
    Saturated { world: World },
    /// Distributions supported inside a fixed set; `|V| - 1` free parameters.
    FixedSupport { support: CoarseSet },
    /// Two coupled binary variables over a four-element world whose
    /// positions are read as `(AB, AB', A'B, A'B')`; parameters `(a, b)`
    /// map to `(ab, a(1-b), (1-a)(1-b), (1-a)b)`.
    PairedBinary { world: World },
}

impl CompleteDataModel {
    pub fn saturated(world: &World) -> CompleteDataModel {
        CompleteDataModel::Saturated {
            world: world.clone(),
        }
    }

    pub fn fixed_support(support: CoarseSet) -> CompleteDataModel {
        CompleteDataModel::FixedSupport { support }
    }

    pub fn paired_binary(world: &World) -> Result<CompleteDataModel> {
        if world.n() != 4 {
            return Err(Error::WrongWorldSize {
                expected: 4,
                got: world.n(),
            });
        }
        Ok(CompleteDataModel::PairedBinary {
            world: world.clone(),
        })
    }

    pub fn world(&self) -> &World {
        match self {
            CompleteDataModel::Saturated { world } => world,
            CompleteDataModel::FixedSupport { support } => support.world(),
            CompleteDataModel::PairedBinary { world } => world,
        }
    }

    /// Number of free parameters.
    pub fn param_dim(&self) -> usize {
        match self {
            CompleteDataModel::Saturated { world } => world.n() - 1,
            CompleteDataModel::FixedSupport { support } => support.len() - 1,
            CompleteDataModel::PairedBinary { .. } => 2,
        }
    }

    /// Maps a parameter point into a distribution on the world.
    ///
    /// For the simplex-coordinate variants the parameters are the first
    /// probabilities (of the supported worlds in index order) and the last
    /// one is the remainder. Off-support components are exact zeros.
    pub fn to_distribution(&self, params: &[f64]) -> Result<CompleteDistribution> {
        if params.len() != self.param_dim() {
            return Err(Error::WrongParamCount {
                expected: self.param_dim(),
                got: params.len(),
            });
        }
        match self {
            CompleteDataModel::Saturated { world } => {
                simplex_point(world, &(0..world.n()).collect::<Vec<_>>(), params)
            }
            CompleteDataModel::FixedSupport { support } => {
                let idx: Vec<usize> = support.indices().collect();
                simplex_point(support.world(), &idx, params)
            }
            CompleteDataModel::PairedBinary { world } => {
                let (a, b) = (params[0], params[1]);
                for (i, v) in [a, b].into_iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                        return Err(Error::ParamOutOfDomain { index: i, value: v });
                    }
                }
                CompleteDistribution::new(
                    world,
                    vec![a * b, a * (1.0 - b), (1.0 - a) * (1.0 - b), (1.0 - a) * b],
                )
            }
        }
    }

    /// The strata of the model: pairs of a support set and the parameter
    /// region realizing exactly that support. Together they cover the
    /// parameter space.
    pub fn support_strata(&self) -> Result<Vec<SupportStratum>> {
        match self {
            CompleteDataModel::Saturated { world } => {
                if world.n() > MAX_ENUMERATION_WORLDS {
                    return Err(Error::TooLargeForEnumeration {
                        what: "support strata of the saturated model",
                        n: world.n(),
                        max: MAX_ENUMERATION_WORLDS,
                        hint: "restrict the model to a fixed support",
                    });
                }
                Ok(bits::subsets_by_size(world.full_mask())
                    .map(|mask| SupportStratum {
                        support: CoarseSet {
                            world: world.clone(),
                            mask,
                        },
                        region: StratumRegion::SupportExactly,
                    })
                    .collect())
            }
            CompleteDataModel::FixedSupport { support } => Ok(vec![SupportStratum {
                support: support.clone(),
                region: StratumRegion::SupportExactly,
            }]),
            CompleteDataModel::PairedBinary { world } => {
                let mut strata = Vec::with_capacity(9);
                let axes = [
                    AxisRange::Fixed(0.0),
                    AxisRange::Open01,
                    AxisRange::Fixed(1.0),
                ];
                for a in axes {
                    for b in axes {
                        let support = paired_binary_support(world, a, b)?;
                        strata.push(SupportStratum {
                            support,
                            region: StratumRegion::ParamBox(vec![a, b]),
                        });
                    }
                }
                Ok(strata)
            }
        }
    }
}

fn simplex_point(world: &World, indices: &[usize], params: &[f64]) -> Result<CompleteDistribution> {
    let mut probs = vec![0.0; world.n()];
    let mut sum = 0.0;
    for (k, &p) in params.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::ParamOutOfDomain { index: k, value: p });
        }
        sum += p;
        probs[indices[k]] = p;
    }
    if sum > 1.0 + NORMALIZATION_TOL {
        return Err(Error::ParamOutOfDomain {
            index: params.len() - 1,
            value: sum,
        });
    }
    probs[indices[params.len()]] = (1.0 - sum).max(0.0);
    CompleteDistribution::new(world, probs)
}

fn paired_binary_support(world: &World, a: AxisRange, b: AxisRange) -> Result<CoarseSet> {
    // Representative interior point of the region determines the support.
    let val = |r: AxisRange| match r {
        AxisRange::Open01 => 0.5,
        AxisRange::Fixed(v) => v,
    };
    let (av, bv) = (val(a), val(b));
    let probs = [
        av * bv,
        av * (1.0 - bv),
        (1.0 - av) * (1.0 - bv),
        (1.0 - av) * bv,
    ];
    let mut mask = 0u32;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            mask |= 1 << i;
        }
    }
    CoarseSet::from_mask(world.clone(), mask)
}

/// Draws `n_draws` coarse observations: a world from `theta`, then a set
/// from that world's kernel row. Deterministic given the seed.
pub fn sample_coarse(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    n_draws: u64,
    seed: u64,
) -> Result<ObservedSample> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    sample_coarse_with(theta, kernel, n_draws, &mut rng)
}

/// As [`sample_coarse`] but with an explicitly passed generator.
pub fn sample_coarse_with<R: Rng>(
    theta: &CompleteDistribution,
    kernel: &CoarseningKernel,
    n_draws: u64,
    rng: &mut R,
) -> Result<ObservedSample> {
    theta.world().check_same(kernel.world())?;
    if n_draws == 0 {
        return Err(Error::EmptySample);
    }
    if theta.support_mask() == 0 {
        return Err(Error::EmptySupport);
    }
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for _ in 0..n_draws {
        let w = draw_index(theta.probs(), rng);
        let row = &kernel.rows[w];
        let mut u = rng.random_range(0.0..1.0);
        let mut chosen = None;
        for (&mask, &p) in row {
            if u < p {
                chosen = Some(mask);
                break;
            }
            u -= p;
        }
        // Rounding may leave a sliver past the declared row; take the last set.
        let mask = chosen
            .or_else(|| row.keys().next_back().copied())
            .unwrap_or(1 << w);
        debug_assert!(mask & (1 << w) != 0);
        *counts.entry(mask).or_insert(0) += 1;
    }
    Ok(ObservedSample {
        world: theta.world().clone(),
        counts,
        total: n_draws,
    })
}

fn draw_index<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let mut u = rng.random_range(0.0..1.0);
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        if u < p {
            return i;
        }
        u -= p;
        last_positive = i;
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> World {
        World::new(["w1", "w2", "w3"]).unwrap()
    }

    #[test]
    fn world_rejects_duplicates_and_limits() {
        assert!(matches!(
            World::new(["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(World::new(Vec::<String>::new()).is_err());
        let many: Vec<String> = (0..31).map(|i| format!("w{i}")).collect();
        assert!(matches!(World::new(many), Err(Error::TooManyWorlds { .. })));
    }

    #[test]
    fn sets_are_nonempty_and_bounded() {
        let w = abc();
        assert!(w.set_of([]).is_err());
        assert!(w.set_of([3]).is_err());
        let s = w.set_from_labels(&["w1", "w3"]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(0) && !s.contains(1) && s.contains(2));
        assert_eq!(s.to_string(), "{w1,w3}");
    }

    #[test]
    fn prob_of_set_examples() {
        let w = abc();
        let theta2 = CompleteDistribution::new(&w, vec![0.5, 0.0, 0.5]).unwrap();
        let theta3 = CompleteDistribution::new(&w, vec![1.0 / 3.0; 3]).unwrap();
        let u12 = w.set_from_labels(&["w1", "w2"]).unwrap();
        let u23 = w.set_from_labels(&["w2", "w3"]).unwrap();
        assert!((theta2.prob_of_set(&u12).unwrap() - 0.5).abs() < 1e-15);
        assert!((theta3.prob_of_set(&u23).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // Full set always has probability one.
        assert!((theta2.prob_of_set(&w.full_set()).unwrap() - 1.0).abs() < 1e-12);
        // World mismatch is an input error.
        let other = World::new(["a", "b", "c"]).unwrap();
        assert!(theta2.prob_of_set(&other.full_set()).is_err());
    }

    #[test]
    fn support_recomputed_from_values() {
        let w = abc();
        let theta = CompleteDistribution::new(&w, vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(theta.support().to_string(), "{w1,w3}");
        let thresholded = theta.clone().with_support_threshold(0.6);
        assert!(thresholded.is_err()); // nothing above 0.6
        let theta = CompleteDistribution::new(&w, vec![0.9, 0.05, 0.05])
            .unwrap()
            .with_support_threshold(0.1)
            .unwrap();
        assert_eq!(theta.support().to_string(), "{w1}");
    }

    #[test]
    fn kernel_validation() {
        let w = abc();
        // Set not containing its row world.
        let bad = CoarseningKernel::new(
            &w,
            vec![
                vec![(w.set_from_labels(&["w2"]).unwrap(), 1.0)],
                vec![(w.singleton(1).unwrap(), 1.0)],
                vec![(w.singleton(2).unwrap(), 1.0)],
            ],
        );
        assert!(matches!(bad, Err(Error::SetMissingWorld { .. })));
        // Row not summing to one.
        let bad = CoarseningKernel::new(
            &w,
            vec![
                vec![(w.singleton(0).unwrap(), 0.5)],
                vec![(w.singleton(1).unwrap(), 1.0)],
                vec![(w.singleton(2).unwrap(), 1.0)],
            ],
        );
        assert!(matches!(bad, Err(Error::RowNotNormalized { .. })));
        let id = CoarseningKernel::identity(&w);
        assert_eq!(id.family().len(), 3);
        assert_eq!(id.lambda(0, &w.singleton(0).unwrap()), 1.0);
        assert_eq!(id.lambda(0, &w.full_set()), 0.0);
    }

    #[test]
    fn joint_prob_identity_kernel() {
        let w = abc();
        let theta = CompleteDistribution::new(&w, vec![0.2, 0.3, 0.5]).unwrap();
        let id = CoarseningKernel::identity(&w);
        for i in 0..3 {
            let s = w.singleton(i).unwrap();
            assert!((joint_obs_prob(&theta, &id, &s).unwrap() - theta.prob(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn paired_binary_formula() {
        let w = World::new(["AB", "AB'", "A'B", "A'B'"]).unwrap();
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let d = model.to_distribution(&[9.0 / 13.0, 1.0]).unwrap();
        let expect = [9.0 / 13.0, 0.0, 0.0, 4.0 / 13.0];
        for i in 0..4 {
            assert!((d.prob(i) - expect[i]).abs() < 1e-15);
        }
        assert_eq!(d.prob(1), 0.0); // exact zero off support
        let d = model.to_distribution(&[0.845, 0.636]).unwrap();
        let expect = [0.53742, 0.30758, 0.05642, 0.09858];
        for i in 0..4 {
            assert!((d.prob(i) - expect[i]).abs() < 1e-9);
        }
        assert!(model.to_distribution(&[1.2, 0.5]).is_err());
        assert!(CompleteDataModel::paired_binary(&abc()).is_err());
    }

    #[test]
    fn saturated_uniform_params() {
        let w = abc();
        let model = CompleteDataModel::saturated(&w);
        let d = model.to_distribution(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for i in 0..3 {
            assert!((d.prob(i) - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn strata_counts() {
        let w = abc();
        assert_eq!(
            CompleteDataModel::saturated(&w)
                .support_strata()
                .unwrap()
                .len(),
            7
        );
        let v = w.set_from_labels(&["w1", "w3"]).unwrap();
        let strata = CompleteDataModel::fixed_support(v.clone())
            .support_strata()
            .unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(strata[0].support, v);

        let w4 = World::new(["AB", "AB'", "A'B", "A'B'"]).unwrap();
        let strata = CompleteDataModel::paired_binary(&w4)
            .unwrap()
            .support_strata()
            .unwrap();
        assert_eq!(strata.len(), 9);
        // Edge b = 1, 0 < a < 1 has support {AB, A'B'}.
        let edge = strata
            .iter()
            .find(|s| {
                s.region == StratumRegion::ParamBox(vec![AxisRange::Open01, AxisRange::Fixed(1.0)])
            })
            .unwrap();
        assert_eq!(edge.support.to_string(), "{AB,A'B'}");
        // Interior has full support.
        let interior = strata
            .iter()
            .find(|s| {
                s.region == StratumRegion::ParamBox(vec![AxisRange::Open01, AxisRange::Open01])
            })
            .unwrap();
        assert_eq!(interior.support, w4.full_set());
    }

    #[test]
    fn samples_accumulate_and_drop_zero_counts() {
        let w = abc();
        let u12 = w.set_from_labels(&["w1", "w2"]).unwrap();
        let s = ObservedSample::new(
            &w,
            vec![(u12.clone(), 2), (u12.clone(), 1), (w.full_set(), 0)],
        )
        .unwrap();
        assert_eq!(s.total(), 3);
        assert_eq!(s.distinct_count(), 1);
        assert_eq!(s.count(&u12), 3);
        assert!((s.weight(&u12) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_latent_consistent() {
        let w = abc();
        let theta = CompleteDistribution::new(&w, vec![0.2, 0.3, 0.5]).unwrap();
        let id = CoarseningKernel::identity(&w);
        let a = sample_coarse(&theta, &id, 500, 7).unwrap();
        let b = sample_coarse(&theta, &id, 500, 7).unwrap();
        assert_eq!(a, b);
        // Identity kernel yields only singletons.
        for (set, _) in a.distinct() {
            assert_eq!(set.len(), 1);
        }
        let empty = CompleteDistribution::new(&w, vec![0.5, 0.25, 0.25])
            .unwrap()
            .with_support_threshold(0.9);
        assert!(empty.is_err());
    }
}
