use serde::Serialize;

use super::events::FrequencyTable;
use crate::panel::WaveLabel;

/// Label of the single-wave sharpened candidate.
pub const SINGLE_WAVE: &str = "thm1";
pub const WORST_CASE: &str = "worst-case";
pub const PAST_RUN_MNAR: &str = "past-run/mnar";
pub const PAST_RUN_MAR: &str = "past-run/mar0";
pub const FUTURE_RUN_MNAR: &str = "future-run/mnar";
pub const FUTURE_RUN_MAR: &str = "future-run/mar0";

/// One term of a max-form lower bound or min-form upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub label: String,
    pub value: f64,
}

impl Candidate {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
        }
    }
}

/// Index of the largest candidate, first one on ties.
pub fn argmax(cands: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, c) in cands.iter().enumerate() {
        if best.is_none_or(|b| c.value > cands[b].value) {
            best = Some(k);
        }
    }
    best
}

/// Index of the smallest candidate, first one on ties.
pub fn argmin(cands: &[Candidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, c) in cands.iter().enumerate() {
        if best.is_none_or(|b| c.value < cands[b].value) {
            best = Some(k);
        }
    }
    best
}

/// Bounds on the prevalence among survivors at `target_wave`.
///
/// `lower` is the largest lower candidate and `upper` the smallest upper
/// candidate. A side without candidates falls back to 0 (lower) or 1
/// (upper), and the result is then not `informative`. Crossed bounds
/// (`lower > upper`) are kept as computed; diagnostics report them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsResult {
    pub lower: f64,
    pub upper: f64,
    pub lower_candidates: Vec<Candidate>,
    pub upper_candidates: Vec<Candidate>,
    pub target_wave: WaveLabel,
    /// `(I, J)`: past and future waves used.
    pub horizon: (usize, usize),
    pub informative: bool,
}

impl BoundsResult {
    pub(crate) fn from_candidates(
        lower_candidates: Vec<Candidate>,
        upper_candidates: Vec<Candidate>,
        target_wave: WaveLabel,
        horizon: (usize, usize),
    ) -> Self {
        let lower = argmax(&lower_candidates).map_or(0.0, |k| lower_candidates[k].value);
        let upper = argmin(&upper_candidates).map_or(1.0, |k| upper_candidates[k].value);
        let informative = !lower_candidates.is_empty() && !upper_candidates.is_empty();
        Self {
            lower,
            upper,
            lower_candidates,
            upper_candidates,
            target_wave,
            horizon,
            informative,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn selected_lower(&self) -> Option<&Candidate> {
        argmax(&self.lower_candidates).map(|k| &self.lower_candidates[k])
    }

    pub fn selected_upper(&self) -> Option<&Candidate> {
        argmin(&self.upper_candidates).map(|k| &self.upper_candidates[k])
    }

    /// True if `[lower, upper]` lies inside `other` up to `tol`.
    pub fn within(&self, other: &BoundsResult, tol: f64) -> bool {
        self.lower >= other.lower - tol && self.upper <= other.upper + tol
    }
}

/// Bounds that ignore the missing type: every missing outcome is set to 0
/// for the lower bound and to 1 for the upper bound.
pub fn worst_case_bounds(ft: &FrequencyTable) -> BoundsResult {
    let n = ft.survivors;
    let lower = ft.positive / n;
    let upper = (ft.positive + ft.mar + ft.mnar) / n;
    BoundsResult::from_candidates(
        vec![Candidate::new(WORST_CASE, lower)],
        vec![Candidate::new(WORST_CASE, upper)],
        ft.target_wave,
        (0, 0),
    )
}

/// Single-wave bounds when the MAR type is independent of the outcome.
///
/// The MAR units carry no information beyond the prevalence itself, so the
/// bounds are the worst-case bounds computed among the `R != 0` units. When
/// every survivor is MAR the ratios are undefined and the result is the
/// uninformative `[0, 1]`.
pub fn sharpened_bounds(ft: &FrequencyTable) -> BoundsResult {
    let d = ft.not_mar();
    let (lower, upper) = if d > 0.0 {
        (
            vec![Candidate::new(SINGLE_WAVE, ft.positive / d)],
            vec![Candidate::new(SINGLE_WAVE, (ft.positive + ft.mnar) / d)],
        )
    } else {
        (Vec::new(), Vec::new())
    };
    BoundsResult::from_candidates(lower, upper, ft.target_wave, (0, 0))
}

/// Multi-wave bounds under a monotone absorbing outcome.
///
/// A positive observation before the target wave pins the target outcome to
/// 1; a negative observation after it (while alive) pins it to 0. Two lower
/// candidates use the pinned positives among the MNAR units (added to the
/// single-wave lower bound) and among the MAR units (which estimate the
/// prevalence directly); the upper candidates mirror them with pinned
/// negatives. Candidates whose denominator is empty are left out.
///
/// With `I = J = 0` this is exactly [`sharpened_bounds`].
pub fn longitudinal_bounds(ft: &FrequencyTable) -> BoundsResult {
    let d = ft.not_mar();
    let mut lower = Vec::with_capacity(2);
    let mut upper = Vec::with_capacity(2);

    if ft.past == 0 {
        if d > 0.0 {
            lower.push(Candidate::new(SINGLE_WAVE, ft.positive / d));
        }
    } else {
        if d > 0.0 {
            lower.push(Candidate::new(
                PAST_RUN_MNAR,
                (ft.positive + ft.past_mnar_total()) / d,
            ));
        }
        if ft.mar > 0.0 {
            lower.push(Candidate::new(PAST_RUN_MAR, ft.past_mar_total() / ft.mar));
        }
    }

    if ft.future == 0 {
        if d > 0.0 {
            upper.push(Candidate::new(SINGLE_WAVE, (ft.positive + ft.mnar) / d));
        }
    } else {
        if d > 0.0 {
            upper.push(Candidate::new(
                FUTURE_RUN_MNAR,
                (ft.positive + ft.mnar - ft.future_mnar_total()) / d,
            ));
        }
        if ft.mar > 0.0 {
            upper.push(Candidate::new(
                FUTURE_RUN_MAR,
                (ft.mar - ft.future_mar_total()) / ft.mar,
            ));
        }
    }

    BoundsResult::from_candidates(lower, upper, ft.target_wave, (ft.past, ft.future))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single-wave table with survivors normalised to `n`.
    fn table(n: f64, positive: f64, mar: f64, mnar: f64) -> FrequencyTable {
        let mut t = FrequencyTable::zeroed(0, 0, 0);
        t.survivors = n;
        t.positive = positive;
        t.mar = mar;
        t.mnar = mnar;
        t.negative = n - positive - mar - mnar;
        t
    }

    /// The discrete population with P(Y=1)=2/5 and R|Y given by
    /// (Y=1: 0, 1/4, 3/4; Y=0: 1/2, 1/2, 0) over (-1, 0, 1), scaled by 40.
    fn two_fifths_population() -> FrequencyTable {
        // Y=1,R=1: 16*3/4 = 12; R=0: 16/4 + 24/2 = 16; R=-1: 24/2 = 12.
        table(40.0, 12.0, 16.0, 12.0)
    }

    #[test]
    fn worst_case_on_two_fifths_population() {
        let b = worst_case_bounds(&two_fifths_population());
        assert_eq!((b.lower, b.upper), (0.3, 1.0));
        assert_eq!(b.lower_candidates.len(), 1);
        assert_eq!(b.upper_candidates.len(), 1);
    }

    #[test]
    fn worst_case_degenerate_cases() {
        let b = worst_case_bounds(&table(10.0, 3.0, 0.0, 0.0));
        assert_eq!(b.lower, b.upper);
        let b = worst_case_bounds(&table(10.0, 0.0, 4.0, 6.0));
        assert_eq!((b.lower, b.upper), (0.0, 1.0));
    }

    #[test]
    fn sharpened_on_two_fifths_population() {
        let b = sharpened_bounds(&two_fifths_population());
        assert_eq!(b.lower, 0.5);
        assert_eq!(b.upper, 1.0);
        assert!(b.informative);
    }

    #[test]
    fn sharpened_independent_missingness() {
        // Y ~ Bern(0.3), R independent with P(R=1,0,-1) = (0.6, 0.3, 0.1).
        let b = sharpened_bounds(&table(1000.0, 180.0, 300.0, 100.0));
        assert!((b.lower - 0.18 / 0.7).abs() < 1e-15);
        assert!((b.upper - 0.28 / 0.7).abs() < 1e-15);
        assert!(b.lower <= 0.3 && 0.3 <= b.upper);
    }

    #[test]
    fn sharpened_point_identified_without_mnar() {
        let b = sharpened_bounds(&table(100.0, 20.0, 30.0, 0.0));
        assert_eq!(b.lower, b.upper);
    }

    #[test]
    fn sharpened_all_mar_is_uninformative() {
        let b = sharpened_bounds(&table(5.0, 0.0, 5.0, 0.0));
        assert!(!b.informative);
        assert_eq!((b.lower, b.upper), (0.0, 1.0));
        assert!(b.lower_candidates.is_empty());
    }

    #[test]
    fn empty_mar_set_matches_worst_case_exactly() {
        let t = table(77.0, 13.0, 0.0, 21.0);
        let s = sharpened_bounds(&t);
        let w = worst_case_bounds(&t);
        assert_eq!((s.lower, s.upper), (w.lower, w.upper));
    }

    #[test]
    fn longitudinal_reduces_to_sharpened() {
        let t = two_fifths_population();
        assert_eq!(longitudinal_bounds(&t), sharpened_bounds(&t));
    }

    #[test]
    fn longitudinal_future_run_example() {
        // Two waves: Y_{t+1} = Y_t, R_{t+1} independent with P(R_{t+1}=1) = 0.5.
        // Future MNAR run mass: P(Y=0) P(R=-1) P(R'=1) = 0.7 * 0.1 * 0.5 = 0.035.
        // Future MAR run mass:  0.7 * 0.3 * 0.5 = 0.105.
        let mut t = table(1000.0, 180.0, 300.0, 100.0);
        t.future = 1;
        t.future_mnar = vec![35.0];
        t.future_mar = vec![105.0];
        let b = longitudinal_bounds(&t);
        let u: Vec<f64> = b.upper_candidates.iter().map(|c| c.value).collect();
        assert!((u[0] - 0.35).abs() < 1e-12);
        assert!((u[1] - 0.65).abs() < 1e-12);
        assert!((b.upper - 0.35).abs() < 1e-12);
        assert_eq!(b.selected_upper().unwrap().label, FUTURE_RUN_MNAR);
        assert_eq!(b.lower_candidates[0].label, SINGLE_WAVE);
        assert_eq!(b.horizon, (0, 1));
    }

    #[test]
    fn longitudinal_without_mar_drops_mar_candidates() {
        let mut t = table(10.0, 2.0, 0.0, 4.0);
        t.past = 1;
        t.future = 1;
        t.past_mnar = vec![1.0];
        t.past_mar = vec![0.0];
        t.future_mnar = vec![1.0];
        t.future_mar = vec![0.0];
        let b = longitudinal_bounds(&t);
        assert_eq!(b.lower_candidates.len(), 1);
        assert_eq!(b.upper_candidates.len(), 1);
        assert!((b.lower - 0.3).abs() < 1e-15);
        assert!((b.upper - 0.5).abs() < 1e-15);
    }

    #[test]
    fn argmax_ties_pick_first() {
        let c = vec![Candidate::new("a", 0.2), Candidate::new("b", 0.2)];
        assert_eq!(argmax(&c), Some(0));
        assert_eq!(argmin(&c), Some(0));
        assert_eq!(argmax(&[]), None);
    }
}
