//! Frequency tables and bound estimators for the survivor prevalence.

mod aggregate;
mod estimators;
mod events;
mod registry;

pub use aggregate::aggregate_bounds;
pub use estimators::{
    argmax, argmin, longitudinal_bounds, sharpened_bounds, worst_case_bounds, BoundsResult,
    Candidate, FUTURE_RUN_MAR, FUTURE_RUN_MNAR, PAST_RUN_MAR, PAST_RUN_MNAR, SINGLE_WAVE,
    WORST_CASE,
};
pub use events::{
    frequencies, signature, FrequencyTable, Signature, SignatureCounts, TargetResponse,
};
pub use registry::{
    BoundEstimator, DynEstimator, EstimatorRegistry, Longitudinal, Sharpened, WorstCase,
};
