//! Maximum-likelihood machinery: expectation-maximization for the
//! face-value likelihood, stratified profile maximization, the
//! extremal-completion hull, and the likelihood-ratio statistic against the
//! strong-car restriction.

use std::collections::BTreeSet;

use crate::bits;
use crate::car::world_sums;
use crate::error::{Error, Result};
use crate::hitting::minimal_hitting_sets;
use crate::likelihood::{empirical_sup_logl, log_lfv, LogLikelihood};
use crate::model::{
    AxisRange, CoarseSet, CompleteDataModel, CompleteDistribution, ObservedSample, StratumRegion,
    SupportStratum,
};
use crate::profile::{c_scar, c_wcar};

/// Probabilities below this are treated as having left the support when a
/// fit settles; the point is reassigned to the smaller support.
pub const SUPPORT_SNAP: f64 = 1e-9;

/// Residual below which a fit counts as stationary.
const STATIONARITY_TOL: f64 = 1e-6;

/// Stopping rules for the face-value expectation-maximization loop.
#[derive(Debug, Clone, Copy)]
pub struct EmOptions {
    /// Relative log-likelihood change threshold.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EmOptions {
    fn default() -> EmOptions {
        EmOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

impl EmOptions {
    /// Tighter settings for fits feeding test statistics.
    fn tight() -> EmOptions {
        EmOptions {
            tol: 1e-12,
            max_iter: 200_000,
        }
    }
}

/// A fitted distribution with convergence diagnostics.
///
/// `log_likelihood` is the face-value value for plain fits and the profile
/// value for profile maximizers. `stationarity_residual` is the maximal
/// deviation of the per-world sums from one for simplex-family fits, and
/// the projected-gradient norm for parametric fits.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub theta: CompleteDistribution,
    pub params: Option<Vec<f64>>,
    pub log_likelihood: LogLikelihood,
    pub iterations: usize,
    pub converged: bool,
    pub stratum: CoarseSet,
    pub stationarity_residual: f64,
    /// Whether the objective never decreased across iterations.
    pub monotone_ascent: bool,
}

/// Expectation-maximization for the face-value likelihood restricted to a
/// support.
///
/// Multiplies each supported probability by its per-world sum each round;
/// the face-value log-likelihood never decreases. Coordinates that head to
/// the boundary are resolved by a guarded jump: the fit restricted to the
/// reduced support is accepted only when it does not lower the likelihood
/// and the dropped worlds' sums certify first-order optimality. The limit
/// is snapped to exact zeros below [`SUPPORT_SNAP`] and `converged`
/// additionally requires the stationarity residual on the final support to
/// be small.
pub fn em_fv(
    sample: &ObservedSample,
    support: &CoarseSet,
    init: Option<&CompleteDistribution>,
    opts: EmOptions,
) -> Result<FitResult> {
    let world = sample.world();
    world.check_same(support.world())?;
    for (set, _) in sample.distinct() {
        if !set.intersects(support) {
            return Err(Error::UncoveredObservation {
                set: set.to_string(),
            });
        }
    }
    let probs: Vec<f64> = match init {
        None => CompleteDistribution::uniform_on(support).probs().to_vec(),
        Some(start) => {
            world.check_same(start.world())?;
            if (0..world.n()).any(|w| !support.contains(w) && start.prob(w) != 0.0) {
                return Err(Error::InvalidInput(
                    "initial point has mass outside the candidate support".into(),
                ));
            }
            if !log_lfv(start, sample)?.is_finite() {
                return Err(Error::InvalidInput(
                    "initial point has zero face-value likelihood".into(),
                ));
            }
            start.probs().to_vec()
        }
    };

    let state = em_loop(sample, support, probs, &opts, opts.max_iter)?;
    let theta = snap_support(world, &state.probs, sample)
        .unwrap_or(CompleteDistribution::new(world, state.probs.clone())?);
    let ll = log_lfv(&theta, sample)?;
    let residual = stationarity_residual(sample, &theta);
    Ok(FitResult {
        stratum: theta.support(),
        params: None,
        log_likelihood: ll,
        iterations: state.iterations,
        converged: state.settled && residual <= STATIONARITY_TOL,
        stationarity_residual: residual,
        monotone_ascent: state.monotone,
        theta,
    })
}

struct EmState {
    probs: Vec<f64>,
    iterations: usize,
    settled: bool,
    monotone: bool,
}

fn em_loop(
    sample: &ObservedSample,
    support: &CoarseSet,
    mut probs: Vec<f64>,
    opts: &EmOptions,
    budget: usize,
) -> Result<EmState> {
    let world = sample.world();
    let mut theta = CompleteDistribution::new(world, probs.clone())?;
    let mut ll = log_lfv(&theta, sample)?.value();
    let mut monotone = true;
    let mut iterations = 0usize;
    let mut settled = false;
    let mut rejected_jumps: BTreeSet<u32> = BTreeSet::new();
    while iterations < budget {
        iterations += 1;
        let (sums, _) = world_sums(sample, &theta);
        let mut max_change = 0.0f64;
        for w in support.indices() {
            let next = probs[w] * sums[w];
            max_change = max_change.max((next - probs[w]).abs());
            probs[w] = next;
        }
        // The update preserves the total mass up to rounding.
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        theta = CompleteDistribution::new(world, probs.clone())?;
        let next_ll = log_lfv(&theta, sample)?.value();
        if next_ll < ll - 1e-12 * ll.abs().max(1.0) {
            monotone = false;
        }
        let ll_done = (next_ll - ll).abs() <= opts.tol * next_ll.abs().max(1.0);
        ll = next_ll;

        let stop_candidate = ll_done && max_change <= 1e-10;
        if stop_candidate || iterations.is_multiple_of(100) {
            if let Some(jumped) = attempt_boundary_jump(
                sample,
                support,
                &probs,
                ll,
                opts,
                budget - iterations,
                &mut rejected_jumps,
                &mut iterations,
            )? {
                return Ok(EmState {
                    probs: jumped.probs,
                    iterations,
                    settled: jumped.settled,
                    monotone: monotone && jumped.monotone,
                });
            }
        }
        if stop_candidate {
            // Accept the stop only once the snapped candidate is stationary;
            // a coordinate still crossing the snap threshold keeps the loop
            // going.
            let candidate = snap_support(world, &probs, sample).unwrap_or_else(|| theta.clone());
            if stationarity_residual(sample, &candidate) <= 1e-7 {
                settled = true;
                break;
            }
        }
    }
    Ok(EmState {
        probs,
        iterations,
        settled,
        monotone,
    })
}

/// Tries to resolve slowly decaying coordinates by refitting on the support
/// without them. The jump is kept only when the refit does not lower the
/// log-likelihood and every dropped world's sum stays at most one (the
/// first-order condition certifying the reduced face).
#[allow(clippy::too_many_arguments)]
fn attempt_boundary_jump(
    sample: &ObservedSample,
    support: &CoarseSet,
    probs: &[f64],
    current_ll: f64,
    opts: &EmOptions,
    budget: usize,
    rejected: &mut BTreeSet<u32>,
    iterations: &mut usize,
) -> Result<Option<EmState>> {
    if budget == 0 {
        return Ok(None);
    }
    let world = sample.world();
    let theta = CompleteDistribution::new(world, probs.to_vec())?;
    let (sums, _) = world_sums(sample, &theta);
    let mut keep_mask = 0u32;
    let mut dropped: Vec<usize> = Vec::new();
    for w in support.indices() {
        if probs[w] <= 0.0 {
            continue;
        }
        if probs[w] < 1e-3 && sums[w] < 1.0 - 1e-9 {
            dropped.push(w);
        } else {
            keep_mask |= 1 << w;
        }
    }
    if dropped.is_empty() || keep_mask == 0 || rejected.contains(&keep_mask) {
        return Ok(None);
    }
    // The reduced support must still meet every observed set.
    if sample.mask_counts().keys().any(|&m| m & keep_mask == 0) {
        rejected.insert(keep_mask);
        return Ok(None);
    }
    let reduced = world.set_of(bits::iter_bits(keep_mask))?;
    let mut restricted: Vec<f64> = probs
        .iter()
        .enumerate()
        .map(|(w, &p)| if keep_mask & (1 << w) != 0 { p } else { 0.0 })
        .collect();
    let total: f64 = restricted.iter().sum();
    for p in &mut restricted {
        *p /= total;
    }
    let state = em_loop(sample, &reduced, restricted, opts, budget)?;
    *iterations += state.iterations;
    let refit = CompleteDistribution::new(world, state.probs.clone())?;
    let refit_ll = log_lfv(&refit, sample)?.value();
    if refit_ll < current_ll - 1e-12 * current_ll.abs().max(1.0) {
        rejected.insert(keep_mask);
        return Ok(None);
    }
    let (refit_sums, zero_set) = world_sums(sample, &refit);
    if zero_set.is_some() || dropped.iter().any(|&w| refit_sums[w] > 1.0 + 1e-9) {
        rejected.insert(keep_mask);
        return Ok(None);
    }
    Ok(Some(state))
}

/// Zeroes probabilities below the snap threshold and renormalizes; returns
/// `None` when snapping would zero out an observed set.
fn snap_support(
    world: &crate::model::World,
    probs: &[f64],
    sample: &ObservedSample,
) -> Option<CompleteDistribution> {
    if !probs.iter().any(|&p| p > 0.0 && p < SUPPORT_SNAP) {
        return None;
    }
    let mut snapped: Vec<f64> = probs
        .iter()
        .map(|&p| if p < SUPPORT_SNAP { 0.0 } else { p })
        .collect();
    let total: f64 = snapped.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for p in &mut snapped {
        *p /= total;
    }
    let theta = CompleteDistribution::new(world, snapped).ok()?;
    log_lfv(&theta, sample).ok()?.is_finite().then_some(theta)
}

/// Maximal deviation from one of the per-world sums over the support;
/// infinite when an observed set has probability zero.
pub fn stationarity_residual(sample: &ObservedSample, theta: &CompleteDistribution) -> f64 {
    let (sums, zero_set) = world_sums(sample, theta);
    if zero_set.is_some() {
        return f64::INFINITY;
    }
    (0..theta.world().n())
        .filter(|&w| theta.prob(w) > 0.0)
        .map(|w| (sums[w] - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Global face-value maximum over the whole simplex, from the uniform
/// interior start. The limit is strongly-car-compatible with the sample's
/// empirical distribution.
pub fn mle_fv_saturated(sample: &ObservedSample) -> Result<FitResult> {
    em_fv(
        sample,
        &sample.world().full_set(),
        None,
        EmOptions::default(),
    )
}

/// Stratum-restricted profile maximization for the weak-car class over the
/// saturated complete-data family.
///
/// Runs the face-value expectation-maximization on each candidate support
/// and keeps converged fits whose final support is exactly the candidate
/// and whose face value is positive; their `log_likelihood` is the weak-car
/// profile value. Results are ordered by profile value (descending), then
/// support size, then lexicographic support.
pub fn profile_wcar_maxima(
    sample: &ObservedSample,
    supports: Option<&[CoarseSet]>,
) -> Result<Vec<FitResult>> {
    let world = sample.world();
    let candidates: Vec<CoarseSet> = match supports {
        Some(list) => {
            if list.is_empty() {
                return Err(Error::NoCandidates);
            }
            for s in list {
                world.check_same(s.world())?;
            }
            list.to_vec()
        }
        None => {
            let observed: Vec<CoarseSet> = sample.distinct().map(|(s, _)| s).collect();
            let mut c = minimal_hitting_sets(world, &observed)?;
            c.push(world.full_set());
            c
        }
    };
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut results: Vec<FitResult> = Vec::new();
    for v in candidates {
        if !seen.insert(v.mask()) {
            continue;
        }
        let mut fit = em_fv(sample, &v, None, EmOptions::default())?;
        if !fit.converged || !fit.log_likelihood.is_finite() || fit.theta.support() != v {
            continue;
        }
        let factor = c_wcar(&v, sample)?;
        fit.log_likelihood = factor.log_value + fit.log_likelihood;
        results.push(fit);
    }
    results.sort_by(|a, b| {
        b.log_likelihood
            .value()
            .total_cmp(&a.log_likelihood.value())
            .then(a.stratum.len().cmp(&b.stratum.len()))
            .then(bits::lex_cmp(a.stratum.mask(), b.stratum.mask()))
    });
    Ok(results)
}

/// Face-value maximum-likelihood fit of a built-in model.
///
/// The two-parameter paired-binary family is fitted by a coarse grid scan
/// followed by a derivative-free shrinking pattern search; the simplex
/// families delegate to the expectation-maximization fit.
pub fn mle_fv_parametric(
    model: &CompleteDataModel,
    sample: &ObservedSample,
    grid_steps: usize,
) -> Result<FitResult> {
    model.world().check_same(sample.world())?;
    match model {
        CompleteDataModel::Saturated { .. } => mle_fv_saturated(sample),
        CompleteDataModel::FixedSupport { support } => {
            em_fv(sample, support, None, EmOptions::default())
        }
        CompleteDataModel::PairedBinary { .. } => {
            let free = [AxisRange::Open01, AxisRange::Open01];
            fit_param_box(model, sample, &free, grid_steps)
        }
    }
}

/// Maximizes the face-value log-likelihood of a two-parameter model over a
/// box region (pinned coordinates stay exact).
fn fit_param_box(
    model: &CompleteDataModel,
    sample: &ObservedSample,
    axes: &[AxisRange],
    grid_steps: usize,
) -> Result<FitResult> {
    let steps = grid_steps.max(2);
    let value = |params: &[f64]| -> f64 {
        match model.to_distribution(params) {
            Ok(theta) => log_lfv(&theta, sample)
                .map(|l| l.value())
                .unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let fixed: Vec<Option<f64>> = axes
        .iter()
        .map(|a| match a {
            AxisRange::Fixed(v) => Some(*v),
            AxisRange::Open01 => None,
        })
        .collect();
    let free_axes: Vec<usize> = fixed
        .iter()
        .enumerate()
        .filter_map(|(i, f)| f.is_none().then_some(i))
        .collect();

    let assemble = |free_vals: &[f64]| -> Vec<f64> {
        let mut params: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
        for (k, &axis) in free_axes.iter().enumerate() {
            params[axis] = free_vals[k];
        }
        params
    };

    // Grid scan over the free coordinates.
    let mut best_free: Vec<f64> = vec![0.5; free_axes.len()];
    let mut best = f64::NEG_INFINITY;
    let scan = |free_vals: &[f64], best: &mut f64, best_free: &mut Vec<f64>| {
        let v = value(&assemble(free_vals));
        if v > *best {
            *best = v;
            *best_free = free_vals.to_vec();
        }
    };
    match free_axes.len() {
        0 => best = value(&assemble(&[])),
        1 => {
            for i in 0..steps {
                let x = i as f64 / (steps - 1) as f64;
                scan(&[x], &mut best, &mut best_free);
            }
        }
        _ => {
            for i in 0..steps {
                for j in 0..steps {
                    let x = i as f64 / (steps - 1) as f64;
                    let y = j as f64 / (steps - 1) as f64;
                    scan(&[x, y], &mut best, &mut best_free);
                }
            }
        }
    }

    // Shrinking pattern search around the grid winner.
    let mut h = 1.0 / (steps - 1) as f64;
    let mut iterations = 0usize;
    if !free_axes.is_empty() && best.is_finite() {
        while h >= 1e-9 && iterations < 100_000 {
            iterations += 1;
            let mut improved = false;
            let dim = free_axes.len();
            let mut moves: Vec<Vec<f64>> = Vec::new();
            for d in 0..dim {
                for sgn in [-1.0, 1.0] {
                    let mut cand = best_free.clone();
                    cand[d] = (cand[d] + sgn * h).clamp(0.0, 1.0);
                    moves.push(cand);
                }
            }
            if dim == 2 {
                for sa in [-1.0, 1.0] {
                    for sb in [-1.0, 1.0] {
                        let cand = vec![
                            (best_free[0] + sa * h).clamp(0.0, 1.0),
                            (best_free[1] + sb * h).clamp(0.0, 1.0),
                        ];
                        moves.push(cand);
                    }
                }
            }
            for cand in moves {
                let v = value(&assemble(&cand));
                if v > best {
                    best = v;
                    best_free = cand;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
    }

    let params = assemble(&best_free);
    let theta = model.to_distribution(&params)?;
    let residual = projected_gradient_norm(&value, &params, &free_axes);
    Ok(FitResult {
        stratum: theta.support(),
        log_likelihood: log_lfv(&theta, sample)?,
        params: Some(params),
        iterations,
        converged: h < 1e-9 || free_axes.is_empty(),
        stationarity_residual: residual,
        monotone_ascent: true,
        theta,
    })
}

/// Norm of the central-difference gradient over the free axes, with
/// components pointing out of the box projected away.
fn projected_gradient_norm(
    value: &dyn Fn(&[f64]) -> f64,
    params: &[f64],
    free_axes: &[usize],
) -> f64 {
    if free_axes.is_empty() {
        return 0.0;
    }
    let h = 1e-6;
    let mut norm_sq = 0.0;
    for &axis in free_axes {
        let x = params[axis];
        let lo = (x - h).max(0.0);
        let hi = (x + h).min(1.0);
        if hi <= lo {
            continue;
        }
        let mut plus = params.to_vec();
        plus[axis] = hi;
        let mut minus = params.to_vec();
        minus[axis] = lo;
        let g = (value(&plus) - value(&minus)) / (hi - lo);
        let blocked = (x <= 0.0 && g < 0.0) || (x >= 1.0 && g > 0.0);
        if !blocked && g.is_finite() {
            norm_sq += g * g;
        }
    }
    norm_sq.sqrt()
}

/// One row of a per-stratum profile table.
#[derive(Debug, Clone)]
pub struct StratumProfile {
    pub stratum: SupportStratum,
    /// The face-value maximizer over the stratum's closure, when finite.
    pub fit: Option<FitResult>,
    pub c_factor: LogLikelihood,
    /// Profile value `c + max face value`.
    pub profile: LogLikelihood,
    /// Whether the maximizer's support equals the stratum's support (when it
    /// does not, the stratum's supremum is only approached, not attained).
    pub support_attained: bool,
}

/// Per-stratum weak-car profile table with the overall argmax.
#[derive(Debug, Clone)]
pub struct ProfileScan {
    pub rows: Vec<StratumProfile>,
    pub argmax: FitResult,
}

/// Maximizes the weak-car profile likelihood of a built-in model stratum by
/// stratum: the face value is maximized inside each region and shifted by
/// the stratum's correction factor.
///
/// For the saturated family only the strata carrying candidate maxima are
/// tabulated (minimal hitting sets plus the full set); other supports are
/// dominated or have zero face value.
pub fn profile_wcar_parametric(
    model: &CompleteDataModel,
    sample: &ObservedSample,
) -> Result<ProfileScan> {
    model.world().check_same(sample.world())?;
    let world = model.world();
    let strata: Vec<SupportStratum> = match model {
        CompleteDataModel::Saturated { .. } => {
            let observed: Vec<CoarseSet> = sample.distinct().map(|(s, _)| s).collect();
            let mut sets = minimal_hitting_sets(world, &observed)?;
            sets.push(world.full_set());
            sets.dedup();
            sets.into_iter()
                .map(|support| SupportStratum {
                    support,
                    region: StratumRegion::SupportExactly,
                })
                .collect()
        }
        _ => model.support_strata()?,
    };

    let mut rows: Vec<StratumProfile> = Vec::new();
    for stratum in strata {
        let fit = match &stratum.region {
            StratumRegion::ParamBox(axes) => {
                let fit = fit_param_box(model, sample, axes, 201)?;
                fit.log_likelihood.is_finite().then_some(fit)
            }
            StratumRegion::SupportExactly => {
                match em_fv(sample, &stratum.support, None, EmOptions::default()) {
                    Ok(fit) if fit.log_likelihood.is_finite() => Some(fit),
                    _ => None,
                }
            }
        };
        let factor = c_wcar(&stratum.support, sample)?;
        let (profile, attained) = match &fit {
            Some(f) => (
                factor.log_value + f.log_likelihood,
                f.theta.support() == stratum.support,
            ),
            None => (LogLikelihood::NEG_INFINITY, false),
        };
        rows.push(StratumProfile {
            stratum,
            fit,
            c_factor: factor.log_value,
            profile,
            support_attained: attained,
        });
    }

    let best = rows
        .iter()
        .filter(|r| r.support_attained && r.fit.is_some())
        .max_by(|a, b| a.profile.value().total_cmp(&b.profile.value()))
        .or_else(|| {
            rows.iter()
                .filter(|r| r.fit.is_some())
                .max_by(|a, b| a.profile.value().total_cmp(&b.profile.value()))
        })
        .ok_or_else(|| Error::InvalidInput("no stratum carries positive face value".into()))?;
    let mut argmax = best.fit.clone().expect("argmax row has a fit");
    argmax.log_likelihood = best.profile;
    Ok(ProfileScan { rows, argmax })
}

/// Extremal completions of the sample and the orderings that produced them.
///
/// Several orderings can induce the same completion; the extremes are
/// deduplicated on their exact completed counts.
#[derive(Debug, Clone)]
pub struct HullResult {
    pub extremes: Vec<CompleteDistribution>,
    pub orderings_tried: usize,
}

/// Empirical distributions of the order-greedy completions of the sample:
/// each observed set is completed to its first member under every ordering
/// of the worlds. Their convex hull is exactly the set of distributions
/// compatible with the sample.
pub fn dempster_extremes(sample: &ObservedSample) -> Result<HullResult> {
    let world = sample.world();
    let n = world.n();
    if n > 9 {
        return Err(Error::TooLargeForEnumeration {
            what: "extremal completion enumeration",
            n,
            max: 9,
            hint: "query membership with is_compatible instead",
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut completions: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut orderings = 0usize;
    // Heap's algorithm over the world orderings.
    let mut c = vec![0usize; n];
    let record = |order: &[usize], completions: &mut BTreeSet<Vec<u64>>| {
        let mut counts = vec![0u64; n];
        for (&mask, &count) in sample.mask_counts() {
            let first = order
                .iter()
                .copied()
                .find(|&w| mask & (1 << w) != 0)
                .expect("observed sets are nonempty");
            counts[first] += count;
        }
        completions.insert(counts);
    };
    record(&order, &mut completions);
    orderings += 1;
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            record(&order, &mut completions);
            orderings += 1;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }

    let total = sample.total() as f64;
    let extremes = completions
        .into_iter()
        .map(|counts| {
            CompleteDistribution::new(world, counts.iter().map(|&c| c as f64 / total).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HullResult {
        extremes,
        orderings_tried: orderings,
    })
}

/// Likelihood-ratio statistic of the strong-car restriction against the
/// unrestricted coarsening alternative.
#[derive(Debug, Clone)]
pub struct ScarLrt {
    /// `2 * (sup_saturated - sup_scar)`, clamped at zero.
    pub statistic: f64,
    /// Supremum of the observed-data log-likelihood over all kernels and
    /// distributions (the empirical multinomial value).
    pub sup_saturated: LogLikelihood,
    /// Supremum under strong car: factor plus the model's best face value.
    pub sup_scar: LogLikelihood,
}

/// Computes the likelihood-ratio statistic for the strong-car hypothesis
/// within a complete-data model. No reference distribution is attached; the
/// statistic is reported raw.
pub fn lrt_scar(model: &CompleteDataModel, sample: &ObservedSample) -> Result<ScarLrt> {
    model.world().check_same(sample.world())?;
    let sup_sat = empirical_sup_logl(sample);
    let best_fv = match model {
        CompleteDataModel::Saturated { .. } => {
            em_fv(sample, &sample.world().full_set(), None, EmOptions::tight())?
        }
        CompleteDataModel::FixedSupport { support } => {
            em_fv(sample, support, None, EmOptions::tight())?
        }
        CompleteDataModel::PairedBinary { .. } => mle_fv_parametric(model, sample, 201)?,
    };
    let sup_scar = c_scar(sample).log_value + best_fv.log_likelihood;
    let statistic = (2.0 * (sup_sat.value() - sup_scar.value())).max(0.0);
    Ok(ScarLrt {
        statistic,
        sup_saturated: sup_sat,
        sup_scar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::{is_scar_compatible, is_wcar_compatible};
    use crate::model::World;

    fn world3() -> World {
        World::new(["w1", "w2", "w3"]).unwrap()
    }

    fn sample3(w: &World) -> ObservedSample {
        ObservedSample::new(
            w,
            vec![
                (w.set_from_labels(&["w1", "w2"]).unwrap(), 1),
                (w.set_from_labels(&["w2", "w3"]).unwrap(), 1),
                (w.full_set(), 1),
            ],
        )
        .unwrap()
    }

    fn paired_world() -> World {
        World::new(["AB", "AB'", "A'B", "A'B'"]).unwrap()
    }

    /// Six observations of the first variable, three of each value of the
    /// second, one complete observation.
    fn paired_sample(w: &World) -> ObservedSample {
        ObservedSample::new(
            w,
            vec![
                (w.set_from_labels(&["AB", "AB'"]).unwrap(), 6),
                (w.set_from_labels(&["AB", "A'B"]).unwrap(), 3),
                (w.set_from_labels(&["AB'", "A'B'"]).unwrap(), 3),
                (w.set_from_labels(&["A'B'"]).unwrap(), 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn em_on_edge_support_recovers_half_half() {
        let w = world3();
        let sample = sample3(&w);
        let v = w.set_from_labels(&["w1", "w3"]).unwrap();
        let fit = em_fv(&sample, &v, None, EmOptions::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.theta.prob(0) - 0.5).abs() < 1e-9);
        assert_eq!(fit.theta.prob(1), 0.0);
        assert!((fit.theta.prob(2) - 0.5).abs() < 1e-9);
        assert!(fit.monotone_ascent);
    }

    #[test]
    fn em_on_point_support() {
        let w = world3();
        let sample = sample3(&w);
        let v = w.set_from_labels(&["w2"]).unwrap();
        let fit = em_fv(&sample, &v, None, EmOptions::default()).unwrap();
        assert_eq!(fit.theta.probs(), &[0.0, 1.0, 0.0]);
        assert!((fit.log_likelihood.value() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn em_full_support_reaches_global_maximum() {
        let w = world3();
        let sample = sample3(&w);
        let fit = em_fv(&sample, &w.full_set(), None, EmOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.stationarity_residual <= 1e-6);
        assert!(fit.log_likelihood.value() >= (4.0f64 / 9.0).ln());
        // The maximum sits on the boundary at the middle point mass.
        assert!((fit.theta.prob(1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn em_rejects_uncovered_support() {
        let w = world3();
        let sample = sample3(&w);
        let v = w.set_from_labels(&["w1"]).unwrap();
        assert!(matches!(
            em_fv(&sample, &v, None, EmOptions::default()),
            Err(Error::UncoveredObservation { .. })
        ));
    }

    #[test]
    fn saturated_mle_is_scar_compatible() {
        let w = world3();
        let sample = sample3(&w);
        let fit = mle_fv_saturated(&sample).unwrap();
        let res = is_scar_compatible(&sample, &fit.theta, 1e-6).unwrap();
        assert!(res.compatible);
    }

    #[test]
    fn complete_data_mle_is_the_empirical_distribution() {
        let w = world3();
        let sample = ObservedSample::new(
            &w,
            vec![
                (w.singleton(0).unwrap(), 2),
                (w.singleton(1).unwrap(), 5),
                (w.singleton(2).unwrap(), 3),
            ],
        )
        .unwrap();
        let fit = mle_fv_saturated(&sample).unwrap();
        for (i, want) in [0.2, 0.5, 0.3].into_iter().enumerate() {
            assert!((fit.theta.prob(i) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn wcar_profile_maxima_on_three_point_sample() {
        let w = world3();
        let sample = sample3(&w);
        let maxima = profile_wcar_maxima(&sample, None).unwrap();
        assert_eq!(maxima.len(), 2);
        let expected = (1.0f64 / 27.0).ln();
        for fit in &maxima {
            assert!((fit.log_likelihood.value() - expected).abs() < 1e-9);
            let compat = is_wcar_compatible(&sample, &fit.theta, 1e-6).unwrap();
            assert!(compat.compatible);
        }
        let supports: Vec<String> = maxima.iter().map(|f| f.stratum.to_string()).collect();
        assert!(supports.contains(&"{w2}".to_string()));
        assert!(supports.contains(&"{w1,w3}".to_string()));
        // Restricting to the full support keeps nothing: the face-value
        // maximum lives on the boundary.
        let only_full = profile_wcar_maxima(&sample, Some(&[w.full_set()])).unwrap();
        assert!(only_full.is_empty());
    }

    #[test]
    fn paired_binary_fit_matches_known_values() {
        let w = paired_world();
        let sample = paired_sample(&w);
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let fit = mle_fv_parametric(&model, &sample, 201).unwrap();
        let params = fit.params.clone().unwrap();
        assert!((params[0] - 0.845).abs() < 5e-3, "a = {}", params[0]);
        assert!((params[1] - 0.636).abs() < 5e-3, "b = {}", params[1]);
        assert!(fit.stationarity_residual < 1e-6);
    }

    #[test]
    fn paired_binary_point_mass_sample() {
        let w = paired_world();
        let sample = ObservedSample::new(&w, vec![(w.singleton(0).unwrap(), 4)]).unwrap();
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let fit = mle_fv_parametric(&model, &sample, 201).unwrap();
        let params = fit.params.unwrap();
        assert!((params[0] - 1.0).abs() < 1e-8);
        assert!((params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn saturated_family_profile_maxima_include_the_edge_point() {
        let w = paired_world();
        let sample = paired_sample(&w);
        let maxima = profile_wcar_maxima(&sample, None).unwrap();
        assert!(!maxima.is_empty());
        let expected = [9.0 / 13.0, 0.0, 0.0, 4.0 / 13.0];
        let found = maxima
            .iter()
            .any(|fit| (0..4).all(|i| (fit.theta.prob(i) - expected[i]).abs() < 1e-7));
        assert!(found, "edge point missing from {maxima:?}");
        // Every maximum attains the empirical supremum.
        let sup = empirical_sup_logl(&sample).value();
        for fit in &maxima {
            assert!((fit.log_likelihood.value() - sup).abs() < 1e-7);
        }
    }

    #[test]
    fn single_stratum_model_reduces_to_face_value_fit() {
        let w = world3();
        let sample = sample3(&w);
        let model = CompleteDataModel::fixed_support(w.full_set());
        let scan = profile_wcar_parametric(&model, &sample).unwrap();
        assert_eq!(scan.rows.len(), 1);
        let direct = em_fv(&sample, &w.full_set(), None, EmOptions::default()).unwrap();
        for i in 0..3 {
            assert!((scan.argmax.theta.prob(i) - direct.theta.prob(i)).abs() < 1e-9);
        }
    }

    #[test]
    fn paired_binary_profile_argmax_is_on_the_edge() {
        let w = paired_world();
        let sample = paired_sample(&w);
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let scan = profile_wcar_parametric(&model, &sample).unwrap();
        assert_eq!(scan.rows.len(), 9);
        let argmax_params = scan.argmax.params.clone().unwrap();
        assert!((argmax_params[0] - 9.0 / 13.0).abs() < 1e-6);
        assert_eq!(argmax_params[1], 1.0);
        // Exactly two strata carry positive face value.
        let finite = scan.rows.iter().filter(|r| r.profile.is_finite()).count();
        assert_eq!(finite, 2);
    }

    #[test]
    fn hull_of_three_point_sample_has_five_extremes() {
        let w = world3();
        let sample = sample3(&w);
        let hull = dempster_extremes(&sample).unwrap();
        assert_eq!(hull.orderings_tried, 6);
        assert_eq!(hull.extremes.len(), 5);
        let third = 1.0 / 3.0;
        let expected = [
            [0.0, third, 2.0 * third],
            [0.0, 1.0, 0.0],
            [third, 0.0, 2.0 * third],
            [2.0 * third, 0.0, third],
            [2.0 * third, third, 0.0],
        ];
        for (e, want) in hull.extremes.iter().zip(expected) {
            for i in 0..3 {
                assert!((e.prob(i) - want[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hull_of_singletons_is_the_empirical_point() {
        let w = world3();
        let sample = ObservedSample::new(
            &w,
            vec![(w.singleton(0).unwrap(), 3), (w.singleton(2).unwrap(), 1)],
        )
        .unwrap();
        let hull = dempster_extremes(&sample).unwrap();
        assert_eq!(hull.extremes.len(), 1);
        assert!((hull.extremes[0].prob(0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn lrt_positive_for_paired_binary_and_zero_for_saturated() {
        let w = paired_world();
        let sample = paired_sample(&w);
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let lrt = lrt_scar(&model, &sample).unwrap();
        assert!(lrt.statistic > 0.0);
        let saturated = CompleteDataModel::saturated(&w);
        let lrt = lrt_scar(&saturated, &sample).unwrap();
        assert!(lrt.statistic.abs() < 1e-6, "statistic {}", lrt.statistic);
    }

    #[test]
    fn lrt_scales_linearly_in_counts() {
        let w = paired_world();
        let sample = paired_sample(&w);
        let model = CompleteDataModel::paired_binary(&w).unwrap();
        let base = lrt_scar(&model, &sample).unwrap().statistic;
        let scaled = lrt_scar(&model, &sample.scaled(7).unwrap())
            .unwrap()
            .statistic;
        assert!((scaled - 7.0 * base).abs() <= 1e-6 * scaled.abs().max(1.0));
    }
}
