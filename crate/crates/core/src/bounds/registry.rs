use std::collections::BTreeMap;
use std::sync::Arc;

use super::estimators::{longitudinal_bounds, sharpened_bounds, worst_case_bounds, BoundsResult};
use super::events::FrequencyTable;

/// A bound estimator that maps a frequency table to bounds.
///
/// Estimators are selected by [`name`](BoundEstimator::name) through an
/// [`EstimatorRegistry`]. Single-wave estimators ignore the run events of a
/// table built with longer horizons.
pub trait BoundEstimator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Whether the estimator reads past/future run events.
    fn uses_horizons(&self) -> bool {
        false
    }

    fn estimate(&self, table: &FrequencyTable) -> BoundsResult;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WorstCase;

impl BoundEstimator for WorstCase {
    fn name(&self) -> &'static str {
        "worst-case"
    }

    fn description(&self) -> &'static str {
        "binary missing indicator, missing outcomes set to 0 or 1"
    }

    fn estimate(&self, table: &FrequencyTable) -> BoundsResult {
        worst_case_bounds(table)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sharpened;

impl BoundEstimator for Sharpened {
    fn name(&self) -> &'static str {
        "sharpened"
    }

    fn description(&self) -> &'static str {
        "single wave, MAR missing type independent of the outcome"
    }

    fn estimate(&self, table: &FrequencyTable) -> BoundsResult {
        sharpened_bounds(table)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Longitudinal;

impl BoundEstimator for Longitudinal {
    fn name(&self) -> &'static str {
        "longitudinal"
    }

    fn description(&self) -> &'static str {
        "multiple waves, MAR type plus monotone absorbing outcome"
    }

    fn uses_horizons(&self) -> bool {
        true
    }

    fn estimate(&self, table: &FrequencyTable) -> BoundsResult {
        longitudinal_bounds(table)
    }
}

pub type DynEstimator = Arc<dyn BoundEstimator>;

/// Name-keyed collection of bound estimators.
#[derive(Clone, Default)]
pub struct EstimatorRegistry {
    entries: BTreeMap<&'static str, DynEstimator>,
}

impl EstimatorRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry with the worst-case, sharpened and longitudinal estimators.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(WorstCase));
        reg.register(Arc::new(Sharpened));
        reg.register(Arc::new(Longitudinal));
        reg
    }

    /// Adds an estimator, replacing any previous one with the same name.
    pub fn register(&mut self, estimator: DynEstimator) -> Option<DynEstimator> {
        self.entries.insert(estimator.name(), estimator)
    }

    pub fn get(&self, name: &str) -> Option<DynEstimator> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl std::fmt::Debug for EstimatorRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        let reg = EstimatorRegistry::builtin();
        assert_eq!(
            reg.names().collect::<Vec<_>>(),
            vec!["longitudinal", "sharpened", "worst-case"]
        );
        assert!(reg.get("longitudinal").unwrap().uses_horizons());
        assert!(!reg.get("sharpened").unwrap().uses_horizons());
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn custom_estimators_can_be_registered() {
        struct Vacuous;
        impl BoundEstimator for Vacuous {
            fn name(&self) -> &'static str {
                "vacuous"
            }
            fn description(&self) -> &'static str {
                "always [0, 1]"
            }
            fn estimate(&self, table: &FrequencyTable) -> BoundsResult {
                BoundsResult::from_candidates(vec![], vec![], table.target_wave, (0, 0))
            }
        }
        let mut reg = EstimatorRegistry::builtin();
        assert!(reg.register(Arc::new(Vacuous)).is_none());
        let t = FrequencyTable::zeroed(3, 0, 0);
        let b = reg.get("vacuous").unwrap().estimate(&t);
        assert_eq!((b.lower, b.upper, b.informative), (0.0, 1.0, false));
    }
}
