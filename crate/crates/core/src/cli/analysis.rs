//! Orchestration from a panel and a configuration to report rows.

use std::collections::BTreeSet;

use serde::Serialize;

use super::config::RunConfig;
use super::CliError;
use crate::bounds::{
    aggregate_bounds, frequencies, DynEstimator, EstimatorRegistry, SignatureCounts,
};
use crate::diagnostics::{bootstrap_pvalues, check_all};
use crate::error::{ConfigError, EstimationError};
use crate::inference::{derive_seed, panel_interval, CiPlan, TermPlan};
use crate::panel::{
    classify, survivor_weights, validate, CellStatus, Classification, IndicatorPanel, Panel,
    WaveLabel,
};

/// One bounds (and optionally interval) line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub stratum: String,
    pub wave: WaveLabel,
    #[serde(rename = "I")]
    pub past: usize,
    #[serde(rename = "J")]
    pub future: usize,
    pub lower: f64,
    pub upper: f64,
    pub selected_lower: String,
    pub selected_upper: String,
    pub c_value: Option<f64>,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rung: Option<String>,
}

/// One testable-condition line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub stratum: String,
    pub wave: WaveLabel,
    #[serde(rename = "I")]
    pub past: usize,
    #[serde(rename = "J")]
    pub future: usize,
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub vacuous: bool,
    pub p_value: Option<f64>,
}

/// Flag prefix marking rows whose table fails a testable condition.
pub const CHECK_FAILED: &str = "check-failed=";

/// A panel after the configured unit filters.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub panel: Panel,
    /// Units removed for breaking absorbing death or monotone outcomes.
    pub dropped_invalid: usize,
    /// Units removed because no outcome was ever observed.
    pub dropped_unobserved: usize,
    /// Units removed by an explicit id list.
    pub dropped_listed: usize,
}

/// Applies unit filters and the substantive validation.
///
/// Units that break absorbing death or monotonicity fail validation unless
/// `drop_nonmonotone` is set, in which case they are removed.
pub fn prepare(
    panel: Panel,
    cfg: &RunConfig,
    exclude_ids: &BTreeSet<String>,
) -> Result<Prepared, CliError> {
    let before = panel.units().len();
    let panel = panel.without_units(exclude_ids);
    let dropped_listed = before - panel.units().len();

    let before = panel.units().len();
    let panel = if cfg.exclude_never_observed {
        panel.retain_units(|u| u.cells.iter().any(|c| matches!(c, CellStatus::Observed(_))))
    } else {
        panel
    };
    let dropped_unobserved = before - panel.units().len();

    let report = validate(&panel);
    let mut dropped_invalid = 0;
    let panel = if report.is_clean() {
        panel
    } else if cfg.drop_nonmonotone {
        let offenders: BTreeSet<String> = report
            .monotonicity_offenders()
            .union(&report.death_offenders())
            .cloned()
            .collect();
        dropped_invalid = offenders.len();
        panel.without_units(&offenders)
    } else {
        let shown: Vec<String> = report
            .violations
            .iter()
            .take(20)
            .map(|v| format!("  unit `{}`: {:?}", v.unit_id, v.kind))
            .collect();
        return Err(CliError::Validation(format!(
            "{} violation(s) of absorbing death or monotone outcomes (use --drop-nonmonotone to drop the units):\n{}",
            report.violations.len(),
            shown.join("\n")
        )));
    };
    Ok(Prepared {
        panel,
        dropped_invalid,
        dropped_unobserved,
        dropped_listed,
    })
}

pub fn estimator(
    cfg: &RunConfig,
    registry: &EstimatorRegistry,
) -> Result<DynEstimator, ConfigError> {
    registry
        .get(&cfg.method)
        .ok_or_else(|| ConfigError::UnknownEstimator(cfg.method.clone()))
}

/// Requested horizons clipped to the waves around index `t`.
pub fn clip_horizon(cfg: &RunConfig, waves: usize, t: usize) -> (usize, usize) {
    (cfg.past.min(t), cfg.future.min(waves - 1 - t))
}

fn wave_index(ip: &IndicatorPanel, wave: WaveLabel) -> Result<usize, ConfigError> {
    ip.wave_index(wave).ok_or(ConfigError::UnknownWave(wave))
}

/// Bounds rows, one per subgroup of `cfg.by` and target wave, pooling over
/// the strata of `cfg.pool_over` with survivor weights. With `with_ci` each
/// row also carries the bootstrap interval.
pub fn bounds_rows(
    panel: &Panel,
    cls: &Classification,
    cfg: &RunConfig,
    est: &DynEstimator,
    with_ci: bool,
) -> Result<Vec<BoundsRow>, CliError> {
    let ip = classify(panel, cls)?;
    let groups = ip.stratify(&cfg.by).map_err(CliError::covariate)?;
    let mut rows = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        for (w, wave) in cfg.waves(panel).into_iter().enumerate() {
            let t = wave_index(&group.panel, wave)?;
            let (past, future) = if est.uses_horizons() {
                clip_horizon(cfg, panel.waves().len(), t)
            } else {
                (0, 0)
            };
            let strata = group
                .panel
                .stratify(&cfg.pool_over)
                .map_err(CliError::covariate)?;
            let weights = survivor_weights(&strata, t);
            let mut per_stratum = Vec::with_capacity(strata.len());
            let mut failed = BTreeSet::new();
            for (stratum, weight) in strata.iter().zip(weights) {
                if weight == 0.0 {
                    continue;
                }
                let ft = frequencies(&stratum.panel, wave, past, future)?;
                for report in check_all(&ft, cfg.tolerance) {
                    if report.violated() {
                        failed.insert(report.id.to_string());
                    }
                }
                per_stratum.push((est.estimate(&ft), weight));
            }
            if per_stratum.is_empty() {
                return Err(EstimationError::EmptySurvivorSet(wave).into());
            }
            let bounds = aggregate_bounds(&per_stratum);
            let mut flags = Vec::new();
            if !bounds.informative {
                flags.push("uninformative".to_string());
            }
            if est.uses_horizons() && (past, future) != (cfg.past, cfg.future) {
                flags.push("horizon-clipped".to_string());
            }
            if !failed.is_empty() {
                flags.push(format!(
                    "{CHECK_FAILED}{}",
                    failed.into_iter().collect::<Vec<_>>().join("+")
                ));
            }
            let label = |c: Option<&crate::bounds::Candidate>| {
                c.map_or_else(|| "none".to_string(), |c| c.label.clone())
            };
            let mut row = BoundsRow {
                stratum: group.key.to_string(),
                wave,
                past,
                future,
                lower: bounds.lower,
                upper: bounds.upper,
                selected_lower: label(bounds.selected_lower()),
                selected_upper: label(bounds.selected_upper()),
                c_value: None,
                ci_lower: None,
                ci_upper: None,
                flags,
                rung: None,
            };
            if with_ci {
                let plan = CiPlan {
                    terms: TermPlan {
                        estimator: est.as_ref(),
                        target_wave: wave,
                        past,
                        future,
                        strata: &cfg.pool_over,
                    },
                    replicates: cfg.boot,
                    seed: derive_seed(cfg.seed, ((g as u64) << 32) | w as u64),
                    alpha: cfg.alpha,
                };
                let (mut ci, _) = panel_interval(&group.panel, &plan).map_err(|e| {
                    CliError::Inference(format!("stratum {}, wave {wave}: {e}", group.key))
                })?;
                if cfg.clamp01 {
                    ci = ci.clamp01();
                }
                if ci.exact {
                    row.flags.push("exact".into());
                }
                if ci.unreliable {
                    row.flags.push("unreliable-se".into());
                }
                if ci.clamped {
                    row.flags.push("clamped".into());
                }
                row.c_value = Some(ci.c_value);
                row.ci_lower = Some(ci.lower_end);
                row.ci_upper = Some(ci.upper_end);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Label of sensitivity rung `k`: `A` for the all-MNAR baseline, then
/// `JD1`, `JD2`, ...
pub fn rung_label(k: usize) -> String {
    if k == 0 {
        "A".into()
    } else {
        format!("JD{k}")
    }
}

/// Bounds rows for every rung of the ladder. Rung 0 treats every missing
/// cell as MNAR; rung `k` reclassifies the first `k` ladder reasons as MAR.
pub fn sensitivity_rows(
    panel: &Panel,
    cfg: &RunConfig,
    est: &DynEstimator,
    with_ci: bool,
) -> Result<Vec<BoundsRow>, CliError> {
    let mut out = Vec::new();
    for k in 0..=cfg.ladder.len() {
        let cls = Classification::new(cfg.ladder[..k].iter().cloned());
        let label = rung_label(k);
        for mut row in bounds_rows(panel, &cls, cfg, est, with_ci)? {
            row.rung = Some(label.clone());
            out.push(row);
        }
    }
    Ok(out)
}

/// Every applicable testable condition per finest stratum and target wave,
/// using all waves available around the target. With `cfg.boot >= 2` each
/// non-vacuous condition also gets an advisory bootstrap p-value.
pub fn check_rows(
    panel: &Panel,
    cls: &Classification,
    cfg: &RunConfig,
) -> Result<Vec<CheckRow>, CliError> {
    let ip = classify(panel, cls)?;
    let covariates: Vec<String> = cfg.by.iter().chain(&cfg.pool_over).cloned().collect();
    let strata = ip.stratify(&covariates).map_err(CliError::covariate)?;
    let waves = panel.waves().len();
    let mut rows = Vec::new();
    for (g, stratum) in strata.iter().enumerate() {
        for (w, wave) in cfg.waves(panel).into_iter().enumerate() {
            let t = wave_index(&stratum.panel, wave)?;
            let (past, future) = (t, waves - 1 - t);
            let counts = SignatureCounts::from_panel(&stratum.panel, wave, past, future)?;
            let table = counts.table();
            if table.survivors == 0.0 {
                continue;
            }
            let reports = check_all(&table, cfg.tolerance);
            let pvalues = if cfg.boot >= 2 {
                let seed = derive_seed(cfg.seed, ((g as u64) << 32) | w as u64);
                bootstrap_pvalues(&counts, cfg.tolerance, cfg.boot, seed)
            } else {
                vec![None; reports.len()]
            };
            for (r, p) in reports.into_iter().zip(pvalues) {
                rows.push(CheckRow {
                    stratum: stratum.key.to_string(),
                    wave,
                    past,
                    future,
                    condition: r.id.to_string(),
                    lhs: r.lhs,
                    rhs: r.rhs,
                    slack: r.slack,
                    satisfied: r.satisfied,
                    vacuous: r.vacuous,
                    p_value: p,
                });
            }
        }
    }
    Ok(rows)
}
