//! Observable inequalities implied by the partial-MAR and monotonicity
//! assumptions. A violated inequality falsifies their conjunction.
//!
//! Each check is lower-bound-below-upper-bound for one pair of candidate
//! terms. `cor1` is the only condition with waves `t, t+1`, `cor2` the only
//! one with `t-1, t`, and the four `cor3` inequalities cover `t-1, t, t+1`.
//! [`check_consistency`] covers any horizon.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bounds::{longitudinal_bounds, BoundsResult, FrequencyTable, SignatureCounts};
use crate::inference::resample_counts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionId {
    Cor1,
    Cor2,
    /// One of the four three-wave inequalities (1..=4).
    Cor3(u8),
    /// `lower <= upper` at horizons `(I, J)`.
    Generic {
        past: usize,
        future: usize,
    },
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionId::Cor1 => f.write_str("cor1"),
            ConditionId::Cor2 => f.write_str("cor2"),
            ConditionId::Cor3(k) => write!(f, "cor3.{k}"),
            ConditionId::Generic { past, future } => write!(f, "generic({past},{future})"),
        }
    }
}

impl Serialize for ConditionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Outcome of one inequality `lhs <= rhs`.
///
/// A vacuous report had an empty conditioning event; it is satisfied and its
/// sides are reported as zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub vacuous: bool,
    pub tolerance: f64,
}

impl ConditionReport {
    pub fn evaluate(id: ConditionId, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            id,
            lhs,
            rhs,
            slack,
            satisfied: slack >= -tolerance,
            vacuous: false,
            tolerance,
        }
    }

    pub fn vacuous(id: ConditionId, tolerance: f64) -> Self {
        Self {
            id,
            lhs: 0.0,
            rhs: 0.0,
            slack: 0.0,
            satisfied: true,
            vacuous: true,
            tolerance,
        }
    }

    pub fn violated(&self) -> bool {
        !self.satisfied
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticsError {
    #[error("{id} needs at least {past} past and {future} future waves in the table")]
    HorizonTooShort {
        id: String,
        past: usize,
        future: usize,
    },
}

fn require(
    ft: &FrequencyTable,
    id: ConditionId,
    past: usize,
    future: usize,
) -> Result<(), DiagnosticsError> {
    if ft.past < past || ft.future < future {
        return Err(DiagnosticsError::HorizonTooShort {
            id: id.to_string(),
            past,
            future,
        });
    }
    Ok(())
}

/// `LB_t <= 1 - P(Y_{t+1}=0, R_{t+1}=1, S_{t+1}=1 | R_t=0, S_t=1)`.
pub fn check_cor1(
    ft: &FrequencyTable,
    tolerance: f64,
) -> Result<ConditionReport, DiagnosticsError> {
    let id = ConditionId::Cor1;
    require(ft, id, 0, 1)?;
    let d = ft.not_mar();
    if ft.mar <= 0.0 || d <= 0.0 {
        return Ok(ConditionReport::vacuous(id, tolerance));
    }
    let lhs = ft.positive / d;
    let rhs = (ft.mar - ft.future_mar[0]) / ft.mar;
    Ok(ConditionReport::evaluate(id, lhs, rhs, tolerance))
}

/// `P(Y_{t-1}=1, R_{t-1}=1 | R_t=0, S_t=1) <= UB_t`.
pub fn check_cor2(
    ft: &FrequencyTable,
    tolerance: f64,
) -> Result<ConditionReport, DiagnosticsError> {
    let id = ConditionId::Cor2;
    require(ft, id, 1, 0)?;
    let d = ft.not_mar();
    if ft.mar <= 0.0 || d <= 0.0 {
        return Ok(ConditionReport::vacuous(id, tolerance));
    }
    let lhs = ft.past_mar[0] / ft.mar;
    let rhs = (ft.positive + ft.mnar) / d;
    Ok(ConditionReport::evaluate(id, lhs, rhs, tolerance))
}

/// The four inequalities over waves `t-1, t, t+1`, in order.
pub fn check_cor3(
    ft: &FrequencyTable,
    tolerance: f64,
) -> Result<Vec<ConditionReport>, DiagnosticsError> {
    require(ft, ConditionId::Cor3(1), 1, 1)?;
    let d = ft.not_mar();
    let (mar, mnar) = (ft.mar, ft.mnar);
    let (past_mnar, past_mar) = (ft.past_mnar[0], ft.past_mar[0]);
    let (future_mnar, future_mar) = (ft.future_mnar[0], ft.future_mar[0]);
    let eval = |k: u8, lhs: f64, rhs: f64| {
        ConditionReport::evaluate(ConditionId::Cor3(k), lhs, rhs, tolerance)
    };
    let vac = |k: u8| ConditionReport::vacuous(ConditionId::Cor3(k), tolerance);

    let first = if mnar > 0.0 {
        eval(1, future_mnar / mnar + past_mnar / mnar, 1.0)
    } else {
        vac(1)
    };
    let second = if mar > 0.0 {
        eval(2, future_mar / mar + past_mar / mar, 1.0)
    } else {
        vac(2)
    };
    let (third, fourth) = if mar > 0.0 && d > 0.0 {
        (
            eval(3, future_mar / mar + past_mnar / d, 1.0 - ft.positive / d),
            eval(
                4,
                past_mar / mar + future_mnar / d,
                (ft.positive + mnar) / d,
            ),
        )
    } else {
        (vac(3), vac(4))
    };
    Ok(vec![first, second, third, fourth])
}

/// `lower <= upper` for any bounds result.
pub fn check_consistency(br: &BoundsResult, tolerance: f64) -> ConditionReport {
    let id = ConditionId::Generic {
        past: br.horizon.0,
        future: br.horizon.1,
    };
    if !br.informative {
        return ConditionReport::vacuous(id, tolerance);
    }
    ConditionReport::evaluate(id, br.lower, br.upper, tolerance)
}

/// Every condition the table's horizons support, closed-form checks first
/// and the generic consistency check of the longitudinal bounds last.
pub fn check_all(ft: &FrequencyTable, tolerance: f64) -> Vec<ConditionReport> {
    let mut out = Vec::new();
    if ft.future >= 1 {
        out.extend(check_cor1(&ft.truncated(0, 1), tolerance));
    }
    if ft.past >= 1 {
        out.extend(check_cor2(&ft.truncated(1, 0), tolerance));
    }
    if ft.past >= 1 && ft.future >= 1 {
        if let Ok(reports) = check_cor3(&ft.truncated(1, 1), tolerance) {
            out.extend(reports);
        }
    }
    out.push(check_consistency(&longitudinal_bounds(ft), tolerance));
    out
}

/// Advisory bootstrap p-values for `H0: slack >= 0`, one per report of
/// [`check_all`] in the same order.
///
/// Uses the centred bootstrap distribution of the slack: the p-value is the
/// share of replicates with `slack* - slack <= slack`. Vacuous conditions and
/// conditions that are vacuous in a replicate are skipped; `None` when no
/// replicate was usable.
pub fn bootstrap_pvalues(
    counts: &SignatureCounts,
    tolerance: f64,
    replicates: usize,
    seed: u64,
) -> Vec<Option<f64>> {
    let point = check_all(&counts.table(), tolerance);
    let draws: Vec<Vec<ConditionReport>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let table = counts.table_with_counts(&resample_counts(counts, &mut rng));
            if table.survivors == 0.0 {
                Vec::new()
            } else {
                check_all(&table, tolerance)
            }
        })
        .collect();
    point
        .iter()
        .enumerate()
        .map(|(k, report)| {
            if report.vacuous {
                return None;
            }
            let usable: Vec<f64> = draws
                .iter()
                .filter_map(|d| d.get(k))
                .filter(|d| !d.vacuous && d.id == report.id)
                .map(|d| d.slack)
                .collect();
            if usable.is_empty() {
                return None;
            }
            let hits = usable
                .iter()
                .filter(|&&s| s - report.slack <= report.slack)
                .count();
            Some(hits as f64 / usable.len() as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(
        n: f64,
        positive: f64,
        mar: f64,
        mnar: f64,
        past: usize,
        future: usize,
    ) -> FrequencyTable {
        let mut t = FrequencyTable::zeroed(1, past, future);
        t.survivors = n;
        t.positive = positive;
        t.mar = mar;
        t.mnar = mnar;
        t.negative = n - positive - mar - mnar;
        t
    }

    /// Two-wave discrete population scaled by 240: P(Y_t=1) = 2/5,
    /// R_t | Y_t as (Y=1: 0, 1/4, 3/4; Y=0: 1/2, 1/2, 0) over (-1, 0, 1),
    /// infection hazard 1/6, and R_{t+1} | R_t with R_t=0 always observed next.
    fn two_fifths_two_waves() -> FrequencyTable {
        let mut t = base(240.0, 72.0, 96.0, 72.0, 0, 1);
        // R_t=0, Y_{t+1}=0, R_{t+1}=1: 72 (Y_t=0, R_t=0) * 5/6 * 1 = 60.
        t.future_mar = vec![60.0];
        // R_t=-1 (all Y_t=0): 72 * 5/6 * 1/2 = 30.
        t.future_mnar = vec![30.0];
        t
    }

    #[test]
    fn cor1_flags_two_fifths_population() {
        let r = check_cor1(&two_fifths_two_waves(), 0.0).unwrap();
        assert_eq!(r.lhs, 0.5);
        assert_eq!(r.rhs, 0.375);
        assert!(r.violated());
        assert!(!r.vacuous);
    }

    #[test]
    fn cor1_without_future_observations_holds() {
        let t = base(10.0, 2.0, 3.0, 1.0, 0, 1);
        let r = check_cor1(&t, 0.0).unwrap();
        assert_eq!(r.rhs, 1.0);
        assert!(r.satisfied);
    }

    #[test]
    fn cor1_independent_missingness() {
        let mut t = base(1000.0, 180.0, 300.0, 100.0, 0, 1);
        t.future_mnar = vec![35.0];
        t.future_mar = vec![105.0];
        let r = check_cor1(&t, 0.0).unwrap();
        assert!((r.lhs - 0.18 / 0.7).abs() < 1e-15);
        assert!((r.rhs - 0.65).abs() < 1e-15);
        assert!(r.satisfied);
    }

    #[test]
    fn cor1_vacuous_without_mar() {
        let t = base(10.0, 2.0, 0.0, 1.0, 0, 1);
        assert!(check_cor1(&t, 0.0).unwrap().vacuous);
    }

    #[test]
    fn cor1_needs_future_wave() {
        assert!(check_cor1(&base(10.0, 2.0, 3.0, 1.0, 1, 0), 0.0).is_err());
    }

    #[test]
    fn cor2_cases() {
        // No past positives among MAR units.
        let t = base(10.0, 2.0, 3.0, 1.0, 1, 0);
        let r = check_cor2(&t, 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.satisfied);

        // lhs = 0.5 against an upper bound of 0.4: MAR units show half
        // of them positive earlier while the non-MAR units allow at most 0.4.
        let mut t = base(10.0, 2.0, 5.0, 0.0, 1, 0);
        t.negative = 3.0;
        t.past_mar = vec![2.5];
        let r = check_cor2(&t, 0.0).unwrap();
        assert_eq!(r.lhs, 0.5);
        assert!((r.rhs - 0.4).abs() < 1e-15);
        assert!(r.violated());
    }

    #[test]
    fn cor3_without_mnar() {
        let mut t = base(10.0, 4.0, 3.0, 0.0, 1, 1);
        t.past_mar = vec![1.0];
        t.future_mar = vec![1.0];
        let r = check_cor3(&t, 0.0).unwrap();
        assert!(r[0].vacuous);
        assert!(r.iter().all(|c| c.satisfied));
        // third inequality has no MNAR run term
        assert!((r[2].lhs - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cor3_reduces_to_cor1_with_degenerate_past() {
        let mut t = two_fifths_two_waves();
        t.past = 1;
        t.past_mnar = vec![0.0];
        t.past_mar = vec![0.0];
        let r = check_cor3(&t, 0.0).unwrap();
        let c1 = check_cor1(&two_fifths_two_waves(), 0.0).unwrap();
        assert!(r[2].violated());
        assert!((r[2].slack - c1.slack).abs() < 1e-15);
    }

    #[test]
    fn consistency_matches_cor1() {
        let t = two_fifths_two_waves();
        let generic = check_consistency(&longitudinal_bounds(&t), 0.0);
        assert!(generic.violated());
        assert_eq!(generic.id.to_string(), "generic(0,1)");
        let c1 = check_cor1(&t, 0.0).unwrap();
        assert_eq!(generic.slack, c1.slack);
    }

    #[test]
    fn vacuous_consistency_for_uninformative_result() {
        let t = base(3.0, 0.0, 3.0, 0.0, 0, 0);
        let r = check_consistency(&crate::bounds::sharpened_bounds(&t), 0.0);
        assert!(r.vacuous && r.satisfied);
    }

    #[test]
    fn check_all_order() {
        let mut t = base(10.0, 2.0, 3.0, 1.0, 1, 1);
        t.past_mar = vec![0.0];
        t.past_mnar = vec![0.0];
        t.future_mar = vec![0.0];
        t.future_mnar = vec![0.0];
        let ids: Vec<String> = check_all(&t, 0.0)
            .iter()
            .map(|r| r.id.to_string())
            .collect();
        assert_eq!(
            ids,
            vec![
                "cor1",
                "cor2",
                "cor3.1",
                "cor3.2",
                "cor3.3",
                "cor3.4",
                "generic(1,1)"
            ]
        );
    }
}
