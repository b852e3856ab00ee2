use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::panel::{Panel, WaveLabel};

/// Analysis settings read from a JSON file; command-line flags override
/// individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Target waves; every wave of the panel when empty.
    pub target_waves: Vec<WaveLabel>,
    /// Requested past horizon `I`, clipped per target wave.
    pub past: usize,
    /// Requested future horizon `J`, clipped per target wave.
    pub future: usize,
    /// Covariates defining the subgroups reported on separate rows.
    pub by: Vec<String>,
    /// Covariates whose strata are estimated separately and pooled within
    /// each row.
    pub pool_over: Vec<String>,
    /// Missingness reasons treated as MAR.
    pub mar_reasons: Vec<String>,
    /// Reasons moved from MNAR to MAR one rung at a time.
    pub ladder: Vec<String>,
    pub method: String,
    pub alpha: f64,
    pub boot: usize,
    pub seed: u64,
    pub clamp01: bool,
    pub strict_checks: bool,
    /// Slack below which a testable condition counts as violated.
    pub tolerance: f64,
    /// Drop units that break absorbing death or monotone outcomes.
    pub drop_nonmonotone: bool,
    /// Drop units without a single observed outcome.
    pub exclude_never_observed: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            target_waves: Vec::new(),
            past: 0,
            future: 0,
            by: Vec::new(),
            pool_over: Vec::new(),
            mar_reasons: Vec::new(),
            ladder: Vec::new(),
            method: "longitudinal".into(),
            alpha: 0.05,
            boot: 1000,
            seed: 20_240_101,
            clamp01: false,
            strict_checks: false,
            tolerance: 1e-9,
            drop_nonmonotone: false,
            exclude_never_observed: false,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(format!("config: {e}")))
    }

    /// Checks settings that do not depend on the data.
    pub fn check(&self) -> Result<(), ConfigError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::InvalidAlpha(self.alpha));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = self.ladder.iter().find(|r| !seen.insert(r.as_str())) {
            return Err(ConfigError::DuplicateLadderEntry(dup.clone()));
        }
        if let Some(shared) = self.by.iter().find(|c| self.pool_over.contains(c)) {
            return Err(ConfigError::Invalid(format!(
                "covariate `{shared}` is listed in both `by` and `pool_over`"
            )));
        }
        Ok(())
    }

    /// Checks settings against a loaded panel.
    pub fn check_against(&self, panel: &Panel) -> Result<(), ConfigError> {
        self.check()?;
        if let Some(w) = self
            .target_waves
            .iter()
            .find(|w| panel.wave_index(**w).is_none())
        {
            return Err(ConfigError::UnknownWave(*w));
        }
        let vocabulary = panel.reason_vocabulary();
        if let Some(r) = self
            .ladder
            .iter()
            .chain(&self.mar_reasons)
            .find(|r| !vocabulary.contains(*r))
        {
            return Err(ConfigError::UnknownReason(r.clone()));
        }
        let names = panel.covariate_names();
        if let Some(c) = self
            .by
            .iter()
            .chain(&self.pool_over)
            .find(|c| !names.contains(c))
        {
            return Err(ConfigError::Invalid(format!("unknown covariate `{c}`")));
        }
        Ok(())
    }

    pub fn waves(&self, panel: &Panel) -> Vec<WaveLabel> {
        if self.target_waves.is_empty() {
            panel.waves().to_vec()
        } else {
            self.target_waves.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_uses_defaults() {
        let c = RunConfig::from_json(r#"{"past": 2, "ladder": ["moved"]}"#).unwrap();
        assert_eq!(c.past, 2);
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.method, "longitudinal");
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(RunConfig::from_json(r#"{"alfa": 0.1}"#).is_err());
    }

    #[test]
    fn duplicate_ladder_and_alpha() {
        let c = RunConfig {
            ladder: vec!["a".into(), "b".into(), "a".into()],
            ..RunConfig::default()
        };
        assert_eq!(
            c.check(),
            Err(ConfigError::DuplicateLadderEntry("a".into()))
        );
        let c = RunConfig {
            alpha: 1.5,
            ..RunConfig::default()
        };
        assert_eq!(c.check(), Err(ConfigError::InvalidAlpha(1.5)));
    }
}
