use thiserror::Error;

/// Errors for model construction and inference routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("world has no labels")]
    EmptyWorld,

    #[error("too many worlds: {n} (limit {max})")]
    TooManyWorlds { n: usize, max: usize },

    #[error("duplicate world label: {0}")]
    DuplicateLabel(String),

    #[error("unknown world label: {0}")]
    UnknownLabel(String),

    #[error("world index {index} out of range (n = {n})")]
    WorldIndexOutOfRange { index: usize, n: usize },

    #[error("coarse set must be nonempty")]
    EmptySet,

    #[error("values belong to different worlds")]
    WorldMismatch,

    #[error("probability out of range: {0}")]
    NotAProbability(f64),

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("kernel row for {world} contains a set not containing it: {set}")]
    SetMissingWorld { world: String, set: String },

    #[error("kernel row for {world} sums to {sum}, expected 1")]
    RowNotNormalized { world: String, sum: f64 },

    #[error("sample has no observations")]
    EmptySample,

    #[error("distribution has empty support")]
    EmptySupport,

    #[error("expected {expected} parameters, got {got}")]
    WrongParamCount { expected: usize, got: usize },

    #[error("parameter {index} out of domain: {value}")]
    ParamOutOfDomain { index: usize, value: f64 },

    #[error("world must have exactly {expected} elements for this model, got {got}")]
    WrongWorldSize { expected: usize, got: usize },

    #[error("observed set {set} does not meet the candidate support")]
    UncoveredObservation { set: String },

    #[error("kernel is not weakly coarsened at random; extension undefined")]
    NotWcar,

    #[error("no candidate supports supplied")]
    NoCandidates,

    #[error("{what} needs n <= {max}, got n = {n}; {hint}")]
    TooLargeForEnumeration {
        what: &'static str,
        n: usize,
        max: usize,
        hint: &'static str,
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
