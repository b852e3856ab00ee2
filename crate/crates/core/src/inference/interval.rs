use serde::Serialize;

use super::bootstrap::{TermEstimate, TermEstimates};
use super::critical::solve_c;
use crate::error::InferenceError;

/// Confidence interval for the partially identified prevalence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalResult {
    pub lower_end: f64,
    pub upper_end: f64,
    pub alpha: f64,
    pub c_value: f64,
    pub selected_lower: String,
    pub selected_upper: String,
    pub estimate_lower: f64,
    pub estimate_upper: f64,
    pub se_lower: f64,
    pub se_upper: f64,
    /// Both selected standard errors were zero, so the interval is the
    /// estimated bounds themselves.
    pub exact: bool,
    /// Some selected term had an unreliable standard error.
    pub unreliable: bool,
    pub clamped: bool,
    pub terms: TermEstimates,
}

impl IntervalResult {
    pub fn width(&self) -> f64 {
        self.upper_end - self.lower_end
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower_end <= value && value <= self.upper_end
    }

    /// The interval intersected with `[0, 1]`.
    pub fn clamp01(mut self) -> Self {
        let lo = self.lower_end.clamp(0.0, 1.0);
        let hi = self.upper_end.clamp(0.0, 1.0);
        self.clamped = lo != self.lower_end || hi != self.upper_end;
        self.lower_end = lo;
        self.upper_end = hi;
        self
    }
}

fn select(terms: &[TermEstimate], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, t) in terms.iter().enumerate() {
        if best.is_none_or(|b| better(t.value, terms[b].value)) {
            best = Some(i);
        }
    }
    best
}

/// Indices of the largest lower term and the smallest upper term. Ties go to
/// the earlier candidate.
pub fn select_indices(terms: &TermEstimates) -> Result<(usize, usize), InferenceError> {
    let q =
        select(&terms.lower, |a, b| a > b).ok_or(InferenceError::NoCandidates { side: "lower" })?;
    let r =
        select(&terms.upper, |a, b| a < b).ok_or(InferenceError::NoCandidates { side: "upper" })?;
    Ok((q, r))
}

/// One selected pair of estimates and standard errors.
struct Selected {
    lower: f64,
    upper: f64,
    se_lower: f64,
    se_upper: f64,
    label_lower: String,
    label_upper: String,
    unreliable: bool,
}

fn interval(
    sel: Selected,
    alpha: f64,
    terms: TermEstimates,
) -> Result<IntervalResult, InferenceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InferenceError::InvalidAlpha(alpha));
    }
    let sigma_max = sel.se_lower.max(sel.se_upper);
    let exact = sigma_max == 0.0;
    let c_value = if exact {
        0.0
    } else {
        solve_c(sel.upper - sel.lower, sigma_max, alpha)?
    };
    Ok(IntervalResult {
        lower_end: sel.lower - c_value * sel.se_lower,
        upper_end: sel.upper + c_value * sel.se_upper,
        alpha,
        c_value,
        selected_lower: sel.label_lower,
        selected_upper: sel.label_upper,
        estimate_lower: sel.lower,
        estimate_upper: sel.upper,
        se_lower: sel.se_lower,
        se_upper: sel.se_upper,
        exact,
        unreliable: sel.unreliable,
        clamped: false,
        terms,
    })
}

/// Interval `[L(q) - C sL(q), U(r) + C sU(r)]` at the plug-in selections.
pub fn ci_construct(terms: &TermEstimates, alpha: f64) -> Result<IntervalResult, InferenceError> {
    let (q, r) = select_indices(terms)?;
    let (lo, up) = (&terms.lower[q], &terms.upper[r]);
    let sel = Selected {
        lower: lo.value,
        upper: up.value,
        se_lower: lo.se,
        se_upper: up.se,
        label_lower: lo.label.clone(),
        label_upper: up.label.clone(),
        unreliable: lo.unreliable || up.unreliable,
    };
    interval(sel, alpha, terms.clone())
}

/// Interval for a weighted sum over independent strata.
///
/// Each stratum selects its own terms; the pooled bound estimates are the
/// weighted sums and their standard errors `sqrt(sum w_k^2 s_k^2)`. With a
/// single stratum of weight 1 this is exactly [`ci_construct`]. Pooled
/// labels read `k:label|...` and the returned terms hold the pooled pair.
pub fn ci_aggregate(
    per_stratum: &[(TermEstimates, f64)],
    alpha: f64,
) -> Result<IntervalResult, InferenceError> {
    let named: Vec<(String, &TermEstimates, f64)> = per_stratum
        .iter()
        .enumerate()
        .map(|(k, (t, w))| (k.to_string(), t, *w))
        .collect();
    ci_aggregate_named(&named, alpha)
}

/// [`ci_aggregate`] with caller-chosen stratum names used in labels and
/// errors.
pub fn ci_aggregate_named(
    per_stratum: &[(String, &TermEstimates, f64)],
    alpha: f64,
) -> Result<IntervalResult, InferenceError> {
    if let [(_, only, w)] = per_stratum {
        if *w == 1.0 {
            return ci_construct(only, alpha);
        }
    }
    if per_stratum.is_empty() {
        return Err(InferenceError::NoCandidates { side: "lower" });
    }
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut var_lower = 0.0;
    let mut var_upper = 0.0;
    let mut labels_lower = Vec::new();
    let mut labels_upper = Vec::new();
    let mut unreliable = false;
    let mut replicates = 0;
    for (name, terms, w) in per_stratum {
        let (q, r) = select_indices(terms).map_err(|e| InferenceError::Stratum {
            stratum: name.clone(),
            source: Box::new(e),
        })?;
        let (lo, up) = (&terms.lower[q], &terms.upper[r]);
        lower += w * lo.value;
        upper += w * up.value;
        var_lower += w * w * lo.se * lo.se;
        var_upper += w * w * up.se * up.se;
        labels_lower.push(format!("{name}:{}", lo.label));
        labels_upper.push(format!("{name}:{}", up.label));
        unreliable |= lo.unreliable || up.unreliable;
        replicates = replicates.max(terms.replicates);
    }
    let sel = Selected {
        lower,
        upper,
        se_lower: var_lower.sqrt(),
        se_upper: var_upper.sqrt(),
        label_lower: labels_lower.join("|"),
        label_upper: labels_upper.join("|"),
        unreliable,
    };
    let pooled = TermEstimates {
        lower: vec![TermEstimate {
            label: sel.label_lower.clone(),
            value: sel.lower,
            se: sel.se_lower,
            degenerate: 0,
            unreliable,
        }],
        upper: vec![TermEstimate {
            label: sel.label_upper.clone(),
            value: sel.upper,
            se: sel.se_upper,
            degenerate: 0,
            unreliable,
        }],
        replicates,
    };
    interval(sel, alpha, pooled).map_err(|e| match e {
        InferenceError::InvalidAlpha(_) => e,
        other => InferenceError::Stratum {
            stratum: "pooled".into(),
            source: Box::new(other),
        },
    })
}
