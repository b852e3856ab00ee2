//! Monte Carlo coverage of the confidence interval.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{generate, Scenario};
use crate::bounds::DynEstimator;
use crate::error::{EstimationError, PanelError, ScenarioError};
use crate::inference::{derive_seed, panel_interval, CiPlan, TermPlan};
use crate::panel::{classify, Classification, IndicatorPanel, Panel, UnitRecord, WaveLabel};

/// Settings shared by every replicate of a coverage study.
#[derive(Clone)]
pub struct CoverageSpec {
    pub estimator: DynEstimator,
    pub target_wave: WaveLabel,
    pub past: usize,
    pub future: usize,
    /// Units per replicate.
    pub n: usize,
    pub reps: usize,
    pub boot: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub reps: usize,
    pub covered: usize,
    pub coverage: f64,
    /// Binomial Monte Carlo standard error of `coverage`.
    pub mc_se: f64,
    pub true_pi: f64,
    /// Replicates where no interval could be formed; they count as misses.
    pub failed: usize,
    pub mean_lower_end: f64,
    pub mean_upper_end: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverageError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error("strata shares must be positive and sum to 1")]
    Shares,
}

fn summarise(reps: usize, true_pi: f64, outcomes: &[Option<(f64, f64)>]) -> CoverageReport {
    let ok: Vec<(f64, f64)> = outcomes.iter().flatten().copied().collect();
    let covered = ok
        .iter()
        .filter(|(lo, hi)| *lo <= true_pi && true_pi <= *hi)
        .count();
    let coverage = covered as f64 / reps as f64;
    let mean = |f: fn(&(f64, f64)) -> f64| {
        if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().map(f).sum::<f64>() / ok.len() as f64
        }
    };
    CoverageReport {
        reps,
        covered,
        coverage,
        mc_se: (coverage * (1.0 - coverage) / reps as f64).sqrt(),
        true_pi,
        failed: reps - ok.len(),
        mean_lower_end: mean(|p| p.0),
        mean_upper_end: mean(|p| p.1),
    }
}

fn run(
    spec: &CoverageSpec,
    strata: &[String],
    true_pi: f64,
    sample: impl Fn(u64) -> Result<IndicatorPanel, CoverageError> + Sync,
) -> Result<CoverageReport, CoverageError> {
    let outcomes: Vec<Option<(f64, f64)>> = (0..spec.reps)
        .into_par_iter()
        .map(|r| {
            let rep_seed = derive_seed(spec.seed, r as u64);
            let ip = sample(rep_seed)?;
            let plan = CiPlan {
                terms: TermPlan {
                    estimator: spec.estimator.as_ref(),
                    target_wave: spec.target_wave,
                    past: spec.past,
                    future: spec.future,
                    strata,
                },
                replicates: spec.boot,
                seed: derive_seed(rep_seed, u64::MAX),
                alpha: spec.alpha,
            };
            Ok(panel_interval(&ip, &plan)
                .ok()
                .map(|(ci, _)| (ci.lower_end, ci.upper_end)))
        })
        .collect::<Result<_, CoverageError>>()?;
    Ok(summarise(spec.reps, true_pi, &outcomes))
}

/// Share of replicates whose interval covers the true survivor prevalence.
pub fn coverage_study(sc: &Scenario, spec: &CoverageSpec) -> Result<CoverageReport, CoverageError> {
    sc.validate()?;
    let true_pi = sc.true_prevalence(spec.target_wave)?;
    let cls = sc.classification();
    run(spec, &[], true_pi, |seed| {
        let panel = generate(sc, spec.n, seed)?;
        Ok(classify(&panel, &cls).expect("scenario reasons are in the vocabulary"))
    })
}

/// Coverage of the pooled interval over strata drawn from separate
/// scenarios. Stratum `k` receives `round(share_k * n)` units tagged with
/// covariate `stratum = k`. The truth is the survivor prevalence of the
/// pooled population.
pub fn coverage_study_stratified(
    strata: &[(Scenario, f64)],
    spec: &CoverageSpec,
) -> Result<CoverageReport, CoverageError> {
    let share_sum: f64 = strata.iter().map(|(_, s)| s).sum();
    if strata.is_empty() || strata.iter().any(|(_, s)| *s <= 0.0) || (share_sum - 1.0).abs() > 1e-9
    {
        return Err(CoverageError::Shares);
    }
    let sizes: Vec<usize> = strata
        .iter()
        .map(|(_, s)| (s * spec.n as f64).round() as usize)
        .collect();
    let mut alive = 0.0;
    let mut positive = 0.0;
    for ((sc, _), &size) in strata.iter().zip(&sizes) {
        sc.validate()?;
        let s = sc.survival(spec.target_wave)?;
        alive += size as f64 * s;
        positive += size as f64 * s * sc.true_prevalence(spec.target_wave)?;
    }
    let true_pi = positive / alive;
    let cls = Classification::new(strata.iter().flat_map(|(sc, _)| sc.mar_reasons.clone()));
    let covariates = vec!["stratum".to_string()];
    run(spec, &covariates, true_pi, |seed| {
        let panel = stratified_sample(strata, &sizes, seed)?;
        Ok(classify(&panel, &cls).expect("scenario reasons are in the vocabulary"))
    })
}

fn stratified_sample(
    strata: &[(Scenario, f64)],
    sizes: &[usize],
    seed: u64,
) -> Result<Panel, CoverageError> {
    let mut units: Vec<UnitRecord> = Vec::new();
    let mut vocabulary = Vec::new();
    for (k, ((sc, _), &size)) in strata.iter().zip(sizes).enumerate() {
        let part = generate(sc, size, derive_seed(seed, k as u64))?;
        vocabulary.extend(part.reason_vocabulary().iter().cloned());
        units.extend(part.units().iter().map(|u| UnitRecord {
            id: format!("s{k}-{}", u.id),
            strata: BTreeMap::from([("stratum".to_string(), k.to_string())]),
            cells: u.cells.clone(),
        }));
    }
    Ok(Panel::new(strata[0].0.labels(), units)?.with_vocabulary(vocabulary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Sharpened;
    use std::sync::Arc;

    fn point_identified() -> Scenario {
        let mut sc = Scenario::example_one();
        sc.initial_response.negative = [0.0, 0.3, 0.7];
        sc.initial_response.positive = [0.0, 0.3, 0.7];
        sc.mar_holds = true;
        sc
    }

    #[test]
    fn point_identified_coverage_is_nominal() {
        let sc = point_identified();
        let spec = CoverageSpec {
            estimator: Arc::new(Sharpened),
            target_wave: 0,
            past: 0,
            future: 0,
            n: 500,
            reps: 200,
            boot: 200,
            alpha: 0.1,
            seed: 3,
        };
        let report = coverage_study(&sc, &spec).unwrap();
        assert_eq!(report.failed, 0);
        assert!(report.coverage >= 0.9 - 3.0 * 0.0212, "{report:?}");
        assert!((report.true_pi - 0.4).abs() < 1e-12);
    }

    #[test]
    fn stratified_truth_and_shares() {
        let spec = CoverageSpec {
            estimator: Arc::new(Sharpened),
            target_wave: 0,
            past: 0,
            future: 0,
            n: 300,
            reps: 20,
            boot: 50,
            alpha: 0.05,
            seed: 1,
        };
        let mut low = point_identified();
        low.initial_prevalence = 0.1;
        let report =
            coverage_study_stratified(&[(point_identified(), 0.5), (low, 0.5)], &spec).unwrap();
        assert!((report.true_pi - 0.25).abs() < 1e-12);
        assert_eq!(report.failed, 0);
        assert!(matches!(
            coverage_study_stratified(&[(point_identified(), 0.4)], &spec),
            Err(CoverageError::Shares)
        ));
    }
}
