//! Synthetic populations, an independent feasible-range oracle, and a
//! coverage harness for checking the estimators end to end.

mod coverage;
mod oracle;
mod scenario;

pub use coverage::{
    coverage_study, coverage_study_stratified, CoverageError, CoverageReport, CoverageSpec,
};
pub use oracle::{oracle_range, FeasibleRange, OracleOutcome};
pub use scenario::{
    generate, population_table, random_scenario, ByOutcome, FromPrevious, Path, PerWave,
    RandomScenarioSpec, Response, ResponseProbs, Scenario,
};
