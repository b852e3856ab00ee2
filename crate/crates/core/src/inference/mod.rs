//! Bootstrap standard errors, the critical-value equation and confidence
//! intervals for the prevalence.

mod bootstrap;
mod critical;
mod interval;
mod panel_ci;

pub use bootstrap::{
    bootstrap_terms, derive_seed, multinomial, replicate_rng, resample_counts, TermEstimate,
    TermEstimates, TermPlan, UNRELIABLE_SHARE,
};
pub use critical::{normal_cdf, normal_quantile, solve_c};
pub use interval::{
    ci_aggregate, ci_aggregate_named, ci_construct, select_indices, IntervalResult,
};
pub use panel_ci::{panel_interval, CiPlan, StratumTerms};
