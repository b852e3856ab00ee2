use thiserror::Error;

use crate::panel::WaveLabel;

/// Structural problems with a panel (shape, labels, covariates).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PanelError {
    #[error("panel must contain at least one wave")]
    NoWaves,
    #[error("wave labels must be strictly increasing ({prev} is followed by {next})")]
    UnorderedWaves { prev: WaveLabel, next: WaveLabel },
    #[error("unit `{unit}` has {got} cells, expected one per wave ({expected})")]
    CellCount {
        unit: String,
        got: usize,
        expected: usize,
    },
    #[error("unit `{unit}` has strata keys that differ from the rest of the panel")]
    StrataKeys { unit: String },
    #[error("duplicate unit id `{0}`")]
    DuplicateUnit(String),
    #[error("unknown covariate `{0}`")]
    UnknownCovariate(String),
}

/// Invalid analysis configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("reason `{0}` is not in the panel's reason vocabulary")]
    UnknownReason(String),
    #[error("sensitivity ladder lists `{0}` more than once")]
    DuplicateLadderEntry(String),
    #[error("unknown wave label {0}")]
    UnknownWave(WaveLabel),
    #[error("unknown bound estimator `{0}`")]
    UnknownEstimator(String),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("{0}")]
    Invalid(String),
}

/// Failures while turning an indicator panel into bounds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("empty survivor set at wave {0}")]
    EmptySurvivorSet(WaveLabel),
    #[error("horizon I={past}, J={future} around wave {wave} leaves the panel's wave range")]
    HorizonOutOfRange {
        wave: WaveLabel,
        past: usize,
        future: usize,
    },
    #[error("unknown wave label {0}")]
    UnknownWave(WaveLabel),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("no usable {side} candidate bound")]
    NoCandidates { side: &'static str },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("sigma_max must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("critical value equation has non-finite input (delta = {0})")]
    NonFiniteDelta(f64),
    #[error("bootstrap needs at least 2 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("stratum `{stratum}`: {source}")]
    Stratum {
        stratum: String,
        #[source]
        source: Box<InferenceError>,
    },
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Invalid simulation scenario.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario needs at least one wave")]
    NoWaves,
    #[error("`{field}` must be a probability, got {value}")]
    Probability { field: String, value: f64 },
    #[error("`{field}` must sum to 1, got {sum}")]
    RowSum { field: String, sum: f64 },
    #[error("`{field}` lists {got} entries, expected {expected}")]
    Length {
        field: String,
        got: usize,
        expected: usize,
    },
    #[error("scenario declares mar_holds but P(Y=1 | R=0) differs from the prevalence by {gap} at wave {wave}")]
    MarFlag { wave: WaveLabel, gap: f64 },
    #[error("{0}")]
    Invalid(String),
}
