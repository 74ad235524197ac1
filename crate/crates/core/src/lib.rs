//! Likelihood-based inference from coarse (set-valued) categorical data.
//!
//! Observations reveal only a set known to contain the true value. This
//! crate distinguishes the weak and strong versions of the
//! coarsened-at-random assumption and makes them operational:
//!
//! - [`model`]: worlds, coarse sets, samples, distributions, coarsening
//!   kernels, built-in complete-data families, and simulation of the
//!   coarsening process.
//! - [`likelihood`]: face-value, observed-data and empirical-supremum
//!   log-likelihoods.
//! - [`car`]: the weak/strong car predicates, the fair evidence condition,
//!   parameter distinctness, and the compatibility relations between an
//!   empirical distribution and a complete-data distribution.
//! - [`profile`]: the correction factors relating profile and face-value
//!   likelihoods, and the profile log-likelihoods of the three coarsening
//!   classes.
//! - [`estimate`]: maximum-likelihood fits, stratified profile maxima, the
//!   extremal-completion hull, and the likelihood-ratio statistic for the
//!   strong-car restriction.
//!
//! All values are immutable after construction and every operation is a
//! pure function; randomized routines take their generator or seed
//! explicitly.
//!
//! ```
//! use coarsedata::*;
//!
//! let world = World::new(["w1", "w2", "w3"])?;
//! let sample = ObservedSample::new(&world, vec![
//!     (world.set_from_labels(&["w1", "w2"])?, 1),
//!     (world.set_from_labels(&["w2", "w3"])?, 1),
//!     (world.full_set(), 1),
//! ])?;
//!
//! // The weak-car profile has two global maxima here, on different
//! // support strata, both attaining the empirical supremum.
//! let maxima = profile_wcar_maxima(&sample, None)?;
//! assert_eq!(maxima.len(), 2);
//! let sup = empirical_sup_logl(&sample);
//! for fit in &maxima {
//!     assert!((fit.log_likelihood.value() - sup.value()).abs() < 1e-9);
//! }
//! # Ok::<(), coarsedata::Error>(())
//! ```

pub mod car;
pub mod estimate;
pub mod hitting;
pub mod likelihood;
pub mod model;
pub mod profile;

mod bits;
mod error;
mod flow;
mod simplex;

pub use car::{
    classify_pd, compatible_exhaustive, extend_wcar_to_scar, fair_evidence, is_compatible, is_scar,
    is_scar_compatible, is_wcar, is_wcar_compatible, scar_compatible_lp, CarReport, CarViolation,
    CoarseningClass, Compatibility, ScarCompatibility, ScarExtension, ScarObstruction,
    WcarCompatibility, DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use estimate::{
    dempster_extremes, em_fv, lrt_scar, mle_fv_parametric, mle_fv_saturated, profile_wcar_maxima,
    profile_wcar_parametric, EmOptions, FitResult, HullResult, ProfileScan, ScarLrt,
    StratumProfile,
};
pub use hitting::minimal_hitting_sets;
pub use likelihood::{empirical_sup_logl, log_lfv, log_lod, LogLikelihood};
pub use model::{
    joint_obs_prob, sample_coarse, sample_coarse_with, AxisRange, CoarseSet, CoarseningKernel,
    CompleteDataModel, CompleteDistribution, KernelBuilder, ObservedSample, StratumRegion,
    SupportStratum, World, MAX_WORLDS,
};
pub use profile::{c_scar, c_wcar, log_profile, CFactorResult, SolveMethod, WorldBinding};
