//! Stratified nonparametric bootstrap of the candidate bound terms.
//!
//! Resampling `n` units with replacement only matters through how many
//! copies of each event signature are drawn, so a replicate draws signature
//! counts from the multinomial with the observed signature shares. This has
//! the same distribution as unit-level resampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{BoundEstimator, BoundsResult, Candidate, SignatureCounts};
use crate::error::{EstimationError, InferenceError};
use crate::panel::{IndicatorPanel, WaveLabel};

/// Share of degenerate replicates above which a term's SE is unreliable.
pub const UNRELIABLE_SHARE: f64 = 0.10;

/// Point estimate and standard error of one candidate term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEstimate {
    pub label: String,
    pub value: f64,
    pub se: f64,
    /// Replicates in which the term was undefined.
    pub degenerate: usize,
    pub unreliable: bool,
}

impl TermEstimate {
    pub fn new(label: impl Into<String>, value: f64, se: f64) -> Self {
        Self {
            label: label.into(),
            value,
            se,
            degenerate: 0,
            unreliable: false,
        }
    }
}

/// Lower-side terms `L(q)` and upper-side terms `U(r)` in candidate order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TermEstimates {
    pub lower: Vec<TermEstimate>,
    pub upper: Vec<TermEstimate>,
    pub replicates: usize,
}

impl TermEstimates {
    pub fn new(lower: Vec<TermEstimate>, upper: Vec<TermEstimate>) -> Self {
        Self {
            lower,
            upper,
            replicates: 0,
        }
    }

    /// Terms with zero standard errors, e.g. for population-level bounds.
    pub fn exact(bounds: &BoundsResult) -> Self {
        let conv = |c: &[Candidate]| {
            c.iter()
                .map(|c| TermEstimate::new(c.label.clone(), c.value, 0.0))
                .collect()
        };
        Self::new(
            conv(&bounds.lower_candidates),
            conv(&bounds.upper_candidates),
        )
    }
}

/// What to bootstrap: an estimator at a target wave and horizon, optionally
/// resampling within strata defined by the given covariates.
#[derive(Clone, Copy)]
pub struct TermPlan<'a> {
    pub estimator: &'a dyn BoundEstimator,
    pub target_wave: WaveLabel,
    pub past: usize,
    pub future: usize,
    pub strata: &'a [String],
}

/// Mixes a base seed with an index into an independent seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for replicate `r` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// Draws `n` items over categories with the given integer weights.
pub fn multinomial<R: Rng + ?Sized>(n: u64, weights: &[u64], rng: &mut R) -> Vec<u64> {
    let mut remaining_weight: u64 = weights.iter().sum();
    let mut remaining = n;
    let mut out = Vec::with_capacity(weights.len());
    for &w in weights {
        let draw = if remaining == 0 || w == 0 {
            0
        } else if w >= remaining_weight {
            remaining
        } else {
            let p = w as f64 / remaining_weight as f64;
            Binomial::new(remaining, p)
                .expect("probability in (0, 1)")
                .sample(rng)
        };
        out.push(draw);
        remaining -= draw;
        remaining_weight -= w;
    }
    out
}

/// One bootstrap draw of the pattern counts of `counts`, keeping the number
/// of units fixed (dead units included in the draw).
pub fn resample_counts<R: Rng + ?Sized>(counts: &SignatureCounts, rng: &mut R) -> Vec<u64> {
    let mut weights = Vec::with_capacity(counts.patterns.len() + 1);
    weights.push(counts.dead);
    weights.extend(counts.patterns.iter().map(|(_, c)| *c));
    let mut draw = multinomial(counts.units(), &weights, rng);
    draw.remove(0);
    draw
}

/// Signature counts of several strata concatenated, remembering where each
/// stratum's patterns start so replicates can resample within strata.
struct StratifiedCounts {
    combined: SignatureCounts,
    groups: Vec<SignatureCounts>,
}

impl StratifiedCounts {
    fn build(ip: &IndicatorPanel, plan: &TermPlan<'_>) -> Result<Self, InferenceError> {
        let panels: Vec<IndicatorPanel> = if plan.strata.is_empty() {
            vec![ip.clone()]
        } else {
            ip.stratify(plan.strata)?
                .into_iter()
                .map(|s| s.panel)
                .collect()
        };
        let groups = panels
            .iter()
            .map(|p| SignatureCounts::from_panel(p, plan.target_wave, plan.past, plan.future))
            .collect::<Result<Vec<_>, _>>()?;
        let combined = SignatureCounts {
            target_wave: plan.target_wave,
            past: plan.past,
            future: plan.future,
            dead: groups.iter().map(|g| g.dead).sum(),
            patterns: groups
                .iter()
                .flat_map(|g| g.patterns.iter().copied())
                .collect(),
        };
        Ok(Self { combined, groups })
    }

    fn resample(&self, rng: &mut ChaCha8Rng) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.combined.patterns.len());
        for g in &self.groups {
            out.extend(resample_counts(g, rng));
        }
        out
    }
}

/// Bootstraps every candidate term of `plan.estimator`.
///
/// Values are the full-sample estimates; standard errors are the sample
/// standard deviation over `replicates` resamples. Replicate `r` draws from
/// the stream `(seed, r)`, so results do not depend on scheduling. A term
/// missing from a replicate (its conditioning event was empty) is recorded
/// as degenerate; if more than 10% of replicates are degenerate the term is
/// flagged unreliable.
pub fn bootstrap_terms(
    ip: &IndicatorPanel,
    plan: &TermPlan<'_>,
    replicates: usize,
    seed: u64,
) -> Result<TermEstimates, InferenceError> {
    if replicates < 2 {
        return Err(InferenceError::TooFewReplicates(replicates));
    }
    let counts = StratifiedCounts::build(ip, plan)?;
    let point_table = counts.combined.table();
    if point_table.survivors == 0.0 {
        return Err(EstimationError::EmptySurvivorSet(plan.target_wave).into());
    }
    let point = plan.estimator.estimate(&point_table);

    let draws: Vec<Option<BoundsResult>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let table = counts
                .combined
                .table_with_counts(&counts.resample(&mut rng));
            (table.survivors > 0.0).then(|| plan.estimator.estimate(&table))
        })
        .collect();

    let summarise = |cands: &[Candidate], side: fn(&BoundsResult) -> &[Candidate]| {
        cands
            .iter()
            .map(|c| {
                let values: Vec<f64> = draws
                    .iter()
                    .filter_map(|d| d.as_ref())
                    .filter_map(|b| side(b).iter().find(|x| x.label == c.label))
                    .map(|x| x.value)
                    .collect();
                let degenerate = replicates - values.len();
                TermEstimate {
                    label: c.label.clone(),
                    value: c.value,
                    se: sample_sd(&values),
                    degenerate,
                    unreliable: values.len() < 2
                        || degenerate as f64 > UNRELIABLE_SHARE * replicates as f64,
                }
            })
            .collect::<Vec<_>>()
    };

    Ok(TermEstimates {
        lower: summarise(&point.lower_candidates, |b| &b.lower_candidates),
        upper: summarise(&point.upper_candidates, |b| &b.upper_candidates),
        replicates,
    })
}

fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{Longitudinal, Sharpened};
    use crate::panel::{ClassifiedCell, IndicatorUnit};
    use std::collections::BTreeMap;

    fn proportion_panel(n: usize, positives: usize) -> IndicatorPanel {
        let units = (0..n)
            .map(|k| IndicatorUnit {
                id: k.to_string(),
                strata: BTreeMap::from([("g".to_string(), (k % 2).to_string())]),
                cells: vec![ClassifiedCell::Observed(k < positives)],
            })
            .collect();
        IndicatorPanel::from_units(vec![0], units).unwrap()
    }

    fn plan<'a>(est: &'a dyn BoundEstimator, strata: &'a [String]) -> TermPlan<'a> {
        TermPlan {
            estimator: est,
            target_wave: 0,
            past: 0,
            future: 0,
            strata,
        }
    }

    #[test]
    fn proportion_se_matches_binomial() {
        let ip = proportion_panel(2000, 600);
        let terms = bootstrap_terms(&ip, &plan(&Sharpened, &[]), 1000, 7).unwrap();
        let p = 0.3f64;
        let analytic = (p * (1.0 - p) / 2000.0).sqrt();
        let se = terms.lower[0].se;
        assert!(
            (se / analytic - 1.0).abs() < 0.15,
            "se={se} analytic={analytic}"
        );
        assert_eq!(terms.lower[0].value, 0.3);
        assert!(!terms.lower[0].unreliable);
    }

    #[test]
    fn constant_term_has_zero_se() {
        let ip = proportion_panel(50, 0);
        let terms = bootstrap_terms(&ip, &plan(&Sharpened, &[]), 200, 1).unwrap();
        assert_eq!(terms.lower[0].se, 0.0);
        assert_eq!(terms.upper[0].se, 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let ip = proportion_panel(300, 120);
        let strata = vec!["g".to_string()];
        let a = bootstrap_terms(&ip, &plan(&Sharpened, &strata), 100, 42).unwrap();
        let b = bootstrap_terms(&ip, &plan(&Sharpened, &strata), 100, 42).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_terms(&ip, &plan(&Sharpened, &strata), 100, 43).unwrap();
        assert_ne!(a.lower[0].se.to_bits(), c.lower[0].se.to_bits());
    }

    #[test]
    fn rare_conditioning_event_is_flagged() {
        // One MAR unit out of 40: the MAR-conditional candidate vanishes in
        // roughly (39/40)^40 = 36% of replicates.
        let mut units: Vec<IndicatorUnit> = (0..39)
            .map(|k| IndicatorUnit {
                id: k.to_string(),
                strata: BTreeMap::new(),
                cells: vec![ClassifiedCell::Observed(k % 3 == 0), ClassifiedCell::Mnar],
            })
            .collect();
        units.push(IndicatorUnit {
            id: "m".into(),
            strata: BTreeMap::new(),
            cells: vec![ClassifiedCell::Observed(true), ClassifiedCell::Mar],
        });
        let ip = IndicatorPanel::from_units(vec![0, 1], units).unwrap();
        let p = TermPlan {
            estimator: &Longitudinal,
            target_wave: 1,
            past: 1,
            future: 0,
            strata: &[],
        };
        let terms = bootstrap_terms(&ip, &p, 200, 3).unwrap();
        let mar_term = terms
            .lower
            .iter()
            .find(|t| t.label == "past-run/mar0")
            .unwrap();
        assert!(mar_term.degenerate > 20);
        assert!(mar_term.unreliable);
        let mnar_term = terms
            .lower
            .iter()
            .find(|t| t.label == "past-run/mnar")
            .unwrap();
        assert_eq!(mnar_term.degenerate, 0);
    }

    #[test]
    fn multinomial_preserves_total() {
        let mut rng = replicate_rng(5, 0);
        for _ in 0..100 {
            let d = multinomial(57, &[3, 0, 10, 44], &mut rng);
            assert_eq!(d.iter().sum::<u64>(), 57);
            assert_eq!(d[1], 0);
        }
    }

    #[test]
    fn too_few_replicates() {
        let ip = proportion_panel(10, 1);
        assert_eq!(
            bootstrap_terms(&ip, &plan(&Sharpened, &[]), 1, 0),
            Err(InferenceError::TooFewReplicates(1))
        );
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
