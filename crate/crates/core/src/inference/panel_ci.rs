use serde::Serialize;

use super::bootstrap::{bootstrap_terms, derive_seed, TermEstimates, TermPlan};
use super::interval::{ci_aggregate_named, ci_construct, IntervalResult};
use crate::error::{EstimationError, InferenceError};
use crate::panel::{survivor_weights, IndicatorPanel, StratumKey};

/// Everything needed to go from an indicator panel to an interval.
#[derive(Clone, Copy)]
pub struct CiPlan<'a> {
    /// Estimator, target wave and horizons. `terms.strata` lists the
    /// covariates whose strata are estimated separately and pooled.
    pub terms: TermPlan<'a>,
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
}

/// Bootstrapped terms of one stratum with its survivor weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumTerms {
    pub key: StratumKey,
    pub weight: f64,
    pub terms: TermEstimates,
}

/// Interval for the survivor prevalence of `ip`.
///
/// Without covariates this is [`ci_construct`] on the bootstrapped terms.
/// With covariates each stratum is bootstrapped on its own seed stream and
/// the strata are pooled with survivor-share weights; strata without
/// survivors at the target wave carry no weight and are skipped.
pub fn panel_interval(
    ip: &IndicatorPanel,
    plan: &CiPlan<'_>,
) -> Result<(IntervalResult, Vec<StratumTerms>), InferenceError> {
    let unstratified = TermPlan {
        strata: &[],
        ..plan.terms
    };
    if plan.terms.strata.is_empty() {
        let terms = bootstrap_terms(ip, &unstratified, plan.replicates, plan.seed)?;
        let ci = ci_construct(&terms, plan.alpha)?;
        let st = StratumTerms {
            key: StratumKey::default(),
            weight: 1.0,
            terms,
        };
        return Ok((ci, vec![st]));
    }
    let t = ip
        .wave_index(plan.terms.target_wave)
        .ok_or(EstimationError::UnknownWave(plan.terms.target_wave))?;
    let strata = ip.stratify(plan.terms.strata)?;
    let weights = survivor_weights(&strata, t);
    let mut per_stratum = Vec::with_capacity(strata.len());
    for (k, (stratum, weight)) in strata.iter().zip(weights).enumerate() {
        if weight == 0.0 {
            continue;
        }
        let terms = bootstrap_terms(
            &stratum.panel,
            &unstratified,
            plan.replicates,
            derive_seed(plan.seed, k as u64),
        )
        .map_err(|e| InferenceError::Stratum {
            stratum: stratum.key.to_string(),
            source: Box::new(e),
        })?;
        per_stratum.push(StratumTerms {
            key: stratum.key.clone(),
            weight,
            terms,
        });
    }
    if per_stratum.is_empty() {
        return Err(EstimationError::EmptySurvivorSet(plan.terms.target_wave).into());
    }
    let named: Vec<(String, &TermEstimates, f64)> = per_stratum
        .iter()
        .map(|s| (s.key.to_string(), &s.terms, s.weight))
        .collect();
    let ci = ci_aggregate_named(&named, plan.alpha)?;
    Ok((ci, per_stratum))
}
