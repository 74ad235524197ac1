//! Correction factors for profile likelihoods and the profile
//! log-likelihoods themselves under the three coarsening classes.
//!
//! The factor for a support `V` maximizes `sum_U count(U) log lambda_U` over
//! nonnegative set values subject to, for each constrained world,
//! `sum over observed U containing w of lambda_U <= 1` (an unobserved set
//! private to `w` absorbs the remainder) or `= 1` when no such private set
//! exists. The optimizer is a fixed-point iteration on the dual variables
//! with a projected-gradient fallback.

use std::collections::BTreeMap;

use crate::bits;
use crate::car::CoarseningClass;
use crate::error::Result;
use crate::likelihood::{log_lfv, LogLikelihood};
use crate::model::{CoarseSet, CompleteDistribution, ObservedSample};

const FP_MAX_ITER: usize = 100_000;
const FP_TOL: f64 = 1e-12;
const PG_MAX_ITER: usize = 100_000;

/// How the factor optimization was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Multiplicative fixed-point iteration on the duals.
    FixedPoint,
    /// Projected gradient on the dual problem with backtracking.
    DualGradient,
    /// No optimization ran (degenerate input, e.g. a disjoint observed set).
    None,
}

/// Constraint status of one constrained world at the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldBinding {
    pub world: usize,
    /// `sum over observed U containing the world of lambda_U`.
    pub sum: f64,
    /// No unobserved private set exists, so the row total must be met by
    /// observed sets alone.
    pub forced_equality: bool,
    /// Whether the constraint is tight at the optimum.
    pub active: bool,
    /// Smallest unobserved set containing this world and no other
    /// constrained world, when one exists.
    pub slack_set: Option<CoarseSet>,
}

/// Result of a correction-factor optimization.
#[derive(Debug, Clone)]
pub struct CFactorResult {
    pub log_value: LogLikelihood,
    /// Maximizing set values, one per distinct observed set.
    pub lambda: BTreeMap<CoarseSet, f64>,
    pub bindings: Vec<WorldBinding>,
    pub kkt_residual: f64,
    pub method: SolveMethod,
    /// Observed set disjoint from the constrained support, when the factor
    /// is irrelevant because the face-value likelihood vanishes there.
    pub disjoint_set: Option<CoarseSet>,
}

/// Factor for the weak-car class at a given support.
pub fn c_wcar(support: &CoarseSet, sample: &ObservedSample) -> Result<CFactorResult> {
    support.world().check_same(sample.world())?;
    Ok(solve_c_factor(sample, support.mask()))
}

/// Factor for the strong-car class; constrains every world, so it does not
/// depend on any distribution.
pub fn c_scar(sample: &ObservedSample) -> CFactorResult {
    solve_c_factor(sample, sample.world().full_mask())
}

fn solve_c_factor(sample: &ObservedSample, constrained: u32) -> CFactorResult {
    let world = sample.world();
    let sets: Vec<(u32, f64)> = sample
        .mask_counts()
        .iter()
        .map(|(&m, &c)| (m, c as f64))
        .collect();

    if let Some(&(mask, _)) = sets.iter().find(|&&(m, _)| m & constrained == 0) {
        return CFactorResult {
            log_value: LogLikelihood::NEG_INFINITY,
            lambda: BTreeMap::new(),
            bindings: Vec::new(),
            kkt_residual: 0.0,
            method: SolveMethod::None,
            disjoint_set: Some(sample.set(mask)),
        };
    }

    // Constraint rows: constrained worlds appearing in at least one
    // observed set. Others are vacuously slack.
    let rows: Vec<usize> = bits::iter_bits(constrained)
        .filter(|&w| sets.iter().any(|&(m, _)| m & (1 << w) != 0))
        .collect();
    let row_of: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let forced: Vec<bool> = rows
        .iter()
        .map(|&w| private_slack_set(sample, constrained, w).is_none())
        .collect();

    // Fixed point on the duals: lambda_U = count(U) / sum of duals over the
    // constrained members of U.
    let mut mu: Vec<f64> = rows
        .iter()
        .map(|&w| {
            sets.iter()
                .filter(|&&(m, _)| m & (1 << w) != 0)
                .map(|&(_, c)| c)
                .sum()
        })
        .collect();
    let lambda_of = |mu: &[f64]| -> Vec<f64> {
        sets.iter()
            .map(|&(mask, c)| {
                let denom: f64 = bits::iter_bits(mask & constrained)
                    .filter_map(|w| row_of.get(&w))
                    .map(|&i| mu[i])
                    .sum();
                c / denom
            })
            .collect()
    };
    let sums_of = |lambda: &[f64]| -> Vec<f64> {
        rows.iter()
            .map(|&w| {
                sets.iter()
                    .zip(lambda)
                    .filter(|&(&(m, _), _)| m & (1 << w) != 0)
                    .map(|(_, &l)| l)
                    .sum()
            })
            .collect()
    };

    let mut lambda = lambda_of(&mu);
    let mut method = SolveMethod::FixedPoint;
    let mut converged = false;
    for _ in 0..FP_MAX_ITER {
        let sums = sums_of(&lambda);
        for (i, &s) in sums.iter().enumerate() {
            mu[i] *= s;
        }
        let next = lambda_of(&mu);
        let delta = next
            .iter()
            .zip(&lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        lambda = next;
        if delta < FP_TOL {
            converged = true;
            break;
        }
    }

    if !converged {
        method = SolveMethod::DualGradient;
        dual_gradient(&sets, &rows, &row_of, constrained, &mut mu);
    }
    newton_polish(&sets, &row_of, constrained, &mut mu);
    lambda = lambda_of(&mu);

    // Feasibility polish: scale down if any constraint overshoots.
    let sums = sums_of(&lambda);
    let overshoot = sums.iter().fold(1.0f64, |m, &s| m.max(s));
    if overshoot > 1.0 {
        for l in &mut lambda {
            *l /= overshoot;
        }
    }
    let sums = sums_of(&lambda);

    let total_count: f64 = sets.iter().map(|&(_, c)| c).sum();
    let mut residual = 0.0f64;
    for (i, &s) in sums.iter().enumerate() {
        residual = residual.max(s - 1.0);
        let weight = mu[i] / (mu[i] + total_count);
        residual = residual.max(weight * (s - 1.0).abs());
        if forced[i] {
            residual = residual.max((s - 1.0).abs());
        }
    }

    let log_value: f64 = sets
        .iter()
        .zip(&lambda)
        .map(|(&(_, c), &l)| c * l.ln())
        .sum();

    let mut bindings: Vec<WorldBinding> = Vec::new();
    for w in bits::iter_bits(constrained) {
        let (sum, forced_eq) = match row_of.get(&w) {
            Some(&i) => (sums[i], forced[i]),
            None => (0.0, private_slack_set(sample, constrained, w).is_none()),
        };
        bindings.push(WorldBinding {
            world: w,
            sum,
            forced_equality: forced_eq,
            active: (sum - 1.0).abs() <= 1e-9,
            slack_set: private_slack_set(sample, constrained, w)
                .map(|mask| CoarseSet::from_mask(world.clone(), mask).expect("nonempty slack set")),
        });
    }

    let lambda_map = sets
        .iter()
        .zip(&lambda)
        .map(|(&(mask, _), &l)| (sample.set(mask), l))
        .collect();

    CFactorResult {
        log_value: LogLikelihood::new(log_value),
        lambda: lambda_map,
        bindings,
        kkt_residual: residual,
        method,
        disjoint_set: None,
    }
}

/// Smallest unobserved set containing `w` and no other constrained world,
/// scanning candidates in increasing size.
fn private_slack_set(sample: &ObservedSample, constrained: u32, w: usize) -> Option<u32> {
    let bit = 1u32 << w;
    let zone = sample.world().full_mask() & !constrained;
    if !sample.mask_counts().contains_key(&bit) {
        return Some(bit);
    }
    bits::subsets_by_size(zone)
        .map(|s| s | bit)
        .find(|s| !sample.mask_counts().contains_key(s))
}

/// Newton refinement of the duals on the active constraint set. The
/// iterative phases give a good warm start; this drives the binding sums to
/// one at quadratic rate, with damping and active-set updates as guards.
fn newton_polish(
    sets: &[(u32, f64)],
    row_of: &std::collections::BTreeMap<usize, usize>,
    constrained: u32,
    mu: &mut [f64],
) {
    let m = mu.len();
    if m == 0 {
        return;
    }
    let scale = sets.iter().map(|&(_, c)| c).sum::<f64>().max(1.0);
    let set_rows: Vec<Vec<usize>> = sets
        .iter()
        .map(|&(mask, _)| {
            bits::iter_bits(mask & constrained)
                .filter_map(|w| row_of.get(&w).copied())
                .collect()
        })
        .collect();
    let g_of = |mu: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; m];
        for (j, &(_, c)) in sets.iter().enumerate() {
            let denom: f64 = set_rows[j].iter().map(|&i| mu[i]).sum();
            if denom <= 0.0 {
                for &i in &set_rows[j] {
                    g[i] = f64::INFINITY;
                }
            } else {
                let l = c / denom;
                for &i in &set_rows[j] {
                    g[i] += l;
                }
            }
        }
        g
    };
    let residual_of = |mu: &[f64]| -> f64 {
        let g = g_of(mu);
        let mut r = 0.0f64;
        for i in 0..m {
            if mu[i] > 1e-9 * scale {
                r = r.max((g[i] - 1.0).abs());
            } else {
                r = r.max(g[i] - 1.0);
            }
        }
        r
    };

    let mut best: Vec<f64> = mu.to_vec();
    let mut best_res = residual_of(&best);
    let mut active: Vec<bool> = mu.iter().map(|&v| v > 1e-9 * scale).collect();
    'refine: for _ in 0..=m {
        // Every set needs an active member or its value is unbounded.
        for rows_j in &set_rows {
            if !rows_j.is_empty() && !rows_j.iter().any(|&i| active[i]) {
                active[rows_j[0]] = true;
            }
        }
        let idx: Vec<usize> = (0..m).filter(|&i| active[i]).collect();
        if idx.is_empty() {
            break;
        }
        let mut work: Vec<f64> = (0..m)
            .map(|i| {
                if active[i] {
                    mu[i].max(1e-12 * scale)
                } else {
                    0.0
                }
            })
            .collect();
        for _ in 0..60 {
            let g = g_of(&work);
            let res = idx
                .iter()
                .map(|&i| (g[i] - 1.0).abs())
                .fold(0.0f64, f64::max);
            if !res.is_finite() || res <= 1e-14 {
                break;
            }
            // Solve J d = 1 - g on the active block.
            let k = idx.len();
            let pos: std::collections::BTreeMap<usize, usize> =
                idx.iter().enumerate().map(|(a, &i)| (i, a)).collect();
            let mut jac = vec![vec![0.0f64; k]; k];
            for (j, &(_, c)) in sets.iter().enumerate() {
                let denom: f64 = set_rows[j].iter().map(|&i| work[i]).sum();
                if denom <= 0.0 {
                    continue;
                }
                let d2 = c / (denom * denom);
                let members: Vec<usize> = set_rows[j]
                    .iter()
                    .filter_map(|i| pos.get(i).copied())
                    .collect();
                for &a in &members {
                    for &b in &members {
                        jac[a][b] -= d2;
                    }
                }
            }
            let rhs: Vec<f64> = idx.iter().map(|&i| 1.0 - g[i]).collect();
            let Some(delta) = solve_dense(jac, rhs) else {
                break;
            };
            // Damped acceptance.
            let mut t = 1.0f64;
            let mut accepted = false;
            for _ in 0..40 {
                let mut trial = work.clone();
                let mut positive = true;
                for (a, &i) in idx.iter().enumerate() {
                    trial[i] = work[i] + t * delta[a];
                    if trial[i] <= 0.0 {
                        positive = false;
                        break;
                    }
                }
                if positive {
                    let gt = g_of(&trial);
                    let res_t = idx
                        .iter()
                        .map(|&i| (gt[i] - 1.0).abs())
                        .fold(0.0f64, f64::max);
                    if res_t < res {
                        work = trial;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let cand_res = residual_of(&work);
        if cand_res < best_res {
            best = work.clone();
            best_res = cand_res;
        }
        // Active-set updates: drop duals pinned at the guard, add violated
        // slack rows.
        let g = g_of(&work);
        let mut next_active = active.clone();
        let mut changed = false;
        for i in 0..m {
            if active[i] && work[i] <= 2e-12 * scale {
                next_active[i] = false;
                changed = true;
            }
            if !active[i] && g[i] > 1.0 + 1e-12 {
                next_active[i] = true;
                changed = true;
            }
        }
        if !changed {
            break 'refine;
        }
        active = next_active;
    }
    if best_res < residual_of(mu) {
        mu.copy_from_slice(&best);
    }
}

/// Gaussian elimination with partial pivoting; `None` on a vanishing pivot.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = b[col];
        for k in col + 1..n {
            v -= a[col][k] * x[k];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

/// Projected gradient descent on the convex dual with backtracking.
fn dual_gradient(
    sets: &[(u32, f64)],
    rows: &[usize],
    row_of: &BTreeMap<usize, usize>,
    constrained: u32,
    mu: &mut Vec<f64>,
) {
    let dual_value = |mu: &[f64]| -> f64 {
        let mut v: f64 = mu.iter().sum();
        for &(mask, c) in sets {
            let denom: f64 = bits::iter_bits(mask & constrained)
                .filter_map(|w| row_of.get(&w))
                .map(|&i| mu[i])
                .sum();
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            v += c * ((c / denom).ln() - 1.0);
        }
        v
    };
    let gradient = |mu: &[f64]| -> Vec<f64> {
        let mut g = vec![1.0; mu.len()];
        for &(mask, c) in sets {
            let denom: f64 = bits::iter_bits(mask & constrained)
                .filter_map(|w| row_of.get(&w))
                .map(|&i| mu[i])
                .sum();
            for w in bits::iter_bits(mask & constrained) {
                if let Some(&i) = row_of.get(&w) {
                    g[i] -= c / denom;
                }
            }
        }
        g
    };

    for v in mu.iter_mut() {
        if *v <= 0.0 {
            *v = 1.0;
        }
    }
    let mut value = dual_value(mu);
    let mut step = 1.0;
    for _ in 0..PG_MAX_ITER {
        let g = gradient(mu);
        let proj_norm: f64 = rows
            .iter()
            .enumerate()
            .map(|(i, _)| {
                if mu[i] <= 0.0 && g[i] > 0.0 {
                    0.0
                } else {
                    g[i] * g[i]
                }
            })
            .sum();
        if proj_norm.sqrt() < 1e-11 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = mu
                .iter()
                .zip(&g)
                .map(|(&m, &gi)| (m - step * gi).max(0.0))
                .collect();
            let trial_value = dual_value(&trial);
            if trial_value <= value - 1e-12 {
                *mu = trial;
                value = trial_value;
                accepted = true;
                step *= 1.3;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
}

/// Profile log-likelihood of `theta` under a coarsening class.
///
/// Weak car adds the support's factor to the face value; strong car adds
/// the distribution-free factor; the saturated class maximizes the observed
/// data log-likelihood over all kernels by concave ascent.
pub fn log_profile(
    theta: &CompleteDistribution,
    sample: &ObservedSample,
    class: CoarseningClass,
) -> Result<LogLikelihood> {
    theta.world().check_same(sample.world())?;
    match class {
        CoarseningClass::WCar => {
            let lfv = log_lfv(theta, sample)?;
            if !lfv.is_finite() {
                return Ok(LogLikelihood::NEG_INFINITY);
            }
            let factor = c_wcar(&theta.support(), sample)?;
            Ok(factor.log_value + lfv)
        }
        CoarseningClass::SCar => {
            let lfv = log_lfv(theta, sample)?;
            if !lfv.is_finite() {
                return Ok(LogLikelihood::NEG_INFINITY);
            }
            Ok(c_scar(sample).log_value + lfv)
        }
        CoarseningClass::Saturated => Ok(saturated_profile(theta, sample)),
    }
}

/// Supremum over all kernels of the observed-data log-likelihood at a fixed
/// distribution, by expectation-maximization on the kernel parameters.
fn saturated_profile(theta: &CompleteDistribution, sample: &ObservedSample) -> LogLikelihood {
    let n = theta.world().n();
    let sets: Vec<(u32, f64)> = sample
        .mask_counts()
        .iter()
        .map(|(&m, &c)| (m, c as f64))
        .collect();
    let positive: Vec<usize> = (0..n).filter(|&w| theta.prob(w) > 0.0).collect();
    if sets
        .iter()
        .any(|&(mask, _)| positive.iter().all(|&w| mask & (1 << w) == 0))
    {
        return LogLikelihood::NEG_INFINITY;
    }

    // lambda[w][j] over the observed sets containing w, uniform start.
    let memberships: Vec<Vec<usize>> = (0..n)
        .map(|w| {
            sets.iter()
                .enumerate()
                .filter(|&(_, &(m, _))| m & (1 << w) != 0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut lambda: Vec<Vec<f64>> = memberships
        .iter()
        .map(|sets_of_w| vec![1.0 / sets_of_w.len().max(1) as f64; sets_of_w.len()])
        .collect();

    let mut prev = f64::NEG_INFINITY;
    let mut value = f64::NEG_INFINITY;
    for _ in 0..500_000 {
        // Observation probabilities under the current kernel.
        let mut s = vec![0.0f64; sets.len()];
        for &w in &positive {
            for (k, &j) in memberships[w].iter().enumerate() {
                s[j] += theta.prob(w) * lambda[w][k];
            }
        }
        value = sets
            .iter()
            .zip(&s)
            .map(|(&(_, c), &sj)| {
                if sj > 0.0 {
                    c * sj.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .sum();
        if (value - prev).abs() <= 1e-12 * value.abs().max(1.0) {
            break;
        }
        prev = value;
        // Responsibility-weighted row updates.
        for &w in &positive {
            let mut weights: Vec<f64> = memberships[w]
                .iter()
                .enumerate()
                .map(|(k, &j)| {
                    if s[j] > 0.0 {
                        sets[j].1 * theta.prob(w) * lambda[w][k] / s[j]
                    } else {
                        0.0
                    }
                })
                .collect();
            let total: f64 = weights.iter().sum();
            if total > 0.0 {
                for v in &mut weights {
                    *v /= total;
                }
                lambda[w] = weights;
            }
        }
    }
    LogLikelihood::new(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::DEFAULT_TOL;
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

    #[test]
    fn factors_on_three_point_sample() {
        let w = world3();
        let sample = sample3(&w);

        let mid = c_wcar(&w.set_from_labels(&["w2"]).unwrap(), &sample).unwrap();
        assert!((mid.log_value.value() - (1.0f64 / 27.0).ln()).abs() < 1e-9);

        let edge = c_wcar(&w.set_from_labels(&["w1", "w3"]).unwrap(), &sample).unwrap();
        assert!((edge.log_value.value() - (4.0f64 / 27.0).ln()).abs() < 1e-9);
        let u12 = w.set_from_labels(&["w1", "w2"]).unwrap();
        let u23 = w.set_from_labels(&["w2", "w3"]).unwrap();
        assert!((edge.lambda[&u12] - 2.0 / 3.0).abs() < 1e-9);
        assert!((edge.lambda[&u23] - 2.0 / 3.0).abs() < 1e-9);
        assert!((edge.lambda[&w.full_set()] - 1.0 / 3.0).abs() < 1e-9);

        let full = c_wcar(&w.full_set(), &sample).unwrap();
        assert!((full.log_value.value() - (1.0f64 / 27.0).ln()).abs() < 1e-9);

        let scar = c_scar(&sample);
        assert!((scar.log_value.value() - (1.0f64 / 27.0).ln()).abs() < 1e-9);
        assert!(scar.kkt_residual < 1e-9);
    }

    #[test]
    fn disjoint_observed_set_gives_zero_factor() {
        let w = world3();
        let sample = sample3(&w);
        let v = w.set_from_labels(&["w1"]).unwrap();
        let res = c_wcar(&v, &sample).unwrap();
        assert_eq!(res.log_value, LogLikelihood::NEG_INFINITY);
        assert_eq!(res.disjoint_set.unwrap().to_string(), "{w2,w3}");
    }

    #[test]
    fn singleton_sample_factors() {
        let w = world3();
        let singles = ObservedSample::new(
            &w,
            vec![
                (w.singleton(0).unwrap(), 2),
                (w.singleton(1).unwrap(), 1),
                (w.singleton(2).unwrap(), 1),
            ],
        )
        .unwrap();
        // Every world's singleton is observed, so all constraints are forced
        // equalities and each value is one.
        let res = c_scar(&singles);
        assert!(res.log_value.value().abs() < 1e-9);
        assert!(res.bindings.iter().all(|b| b.forced_equality && b.active));
    }

    #[test]
    fn profile_values_match_products() {
        let w = world3();
        let sample = sample3(&w);
        let theta2 = CompleteDistribution::new(&w, vec![0.5, 0.0, 0.5]).unwrap();
        let wcar = log_profile(&theta2, &sample, CoarseningClass::WCar).unwrap();
        assert!((wcar.value() - (1.0f64 / 27.0).ln()).abs() < 1e-9);
        let scar = log_profile(&theta2, &sample, CoarseningClass::SCar).unwrap();
        assert!((scar.value() - (1.0f64 / 108.0).ln()).abs() < 1e-9);
    }

    #[test]
    fn saturated_profile_attains_empirical_supremum_for_compatible_theta() {
        let w = world3();
        let sample = sample3(&w);
        let theta3 = CompleteDistribution::new(&w, vec![1.0 / 3.0; 3]).unwrap();
        let sat = log_profile(&theta3, &sample, CoarseningClass::Saturated).unwrap();
        assert!((sat.value() - (1.0f64 / 27.0).ln()).abs() < 1e-6);
    }

    #[test]
    fn class_ordering_is_pointwise() {
        let w = world3();
        let sample = sample3(&w);
        for probs in [
            [0.2, 0.5, 0.3],
            [0.5, 0.0, 0.5],
            [0.0, 1.0, 0.0],
            [0.7, 0.1, 0.2],
        ] {
            let theta = CompleteDistribution::new(&w, probs.to_vec()).unwrap();
            let sat = log_profile(&theta, &sample, CoarseningClass::Saturated)
                .unwrap()
                .value();
            let wc = log_profile(&theta, &sample, CoarseningClass::WCar)
                .unwrap()
                .value();
            let sc = log_profile(&theta, &sample, CoarseningClass::SCar)
                .unwrap()
                .value();
            assert!(sat >= wc - 1e-8, "sat {sat} < wcar {wc}");
            assert!(wc >= sc - 1e-9, "wcar {wc} < scar {sc}");
        }
        let _ = DEFAULT_TOL;
    }
}
