use super::estimators::{BoundsResult, Candidate};

/// Weighted average of per-stratum bounds.
///
/// Each stratum contributes its own max-form lower and min-form upper bound.
/// An uninformative stratum contributes `[0, 1]` and marks the aggregate
/// uninformative. The single candidate on each side is labelled with the
/// per-stratum selections, e.g. `0:past-run/mnar|1:thm1`.
pub fn aggregate_bounds(per_stratum: &[(BoundsResult, f64)]) -> BoundsResult {
    if let [(only, w)] = per_stratum {
        if *w == 1.0 {
            return only.clone();
        }
    }
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut informative = !per_stratum.is_empty();
    let mut lower_labels = Vec::with_capacity(per_stratum.len());
    let mut upper_labels = Vec::with_capacity(per_stratum.len());
    for (k, (b, w)) in per_stratum.iter().enumerate() {
        if b.informative {
            lower += w * b.lower;
            upper += w * b.upper;
        } else {
            informative = false;
            upper += w;
        }
        let sel = |c: Option<&Candidate>| c.map_or("none".to_string(), |c| c.label.clone());
        lower_labels.push(format!("{k}:{}", sel(b.selected_lower())));
        upper_labels.push(format!("{k}:{}", sel(b.selected_upper())));
    }
    let (target_wave, horizon) = per_stratum
        .first()
        .map_or((0, (0, 0)), |(b, _)| (b.target_wave, b.horizon));
    BoundsResult {
        lower,
        upper,
        lower_candidates: vec![Candidate::new(lower_labels.join("|"), lower)],
        upper_candidates: vec![Candidate::new(upper_labels.join("|"), upper)],
        target_wave,
        horizon,
        informative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(lower: f64, upper: f64) -> BoundsResult {
        BoundsResult::from_candidates(
            vec![Candidate::new("thm1", lower)],
            vec![Candidate::new("thm1", upper)],
            2006,
            (0, 0),
        )
    }

    #[test]
    fn single_stratum_is_identity() {
        let b = bounds(0.1, 0.7);
        assert_eq!(aggregate_bounds(&[(b.clone(), 1.0)]), b);
    }

    #[test]
    fn equal_strata_average() {
        let agg = aggregate_bounds(&[(bounds(0.2, 0.4), 0.5), (bounds(0.4, 0.6), 0.5)]);
        assert!((agg.lower - 0.3).abs() < 1e-15);
        assert!((agg.upper - 0.5).abs() < 1e-15);
        assert_eq!(agg.lower_candidates[0].label, "0:thm1|1:thm1");
        assert!(agg.informative);
    }

    #[test]
    fn identical_strata_fixed_point() {
        let agg = aggregate_bounds(&[
            (bounds(0.25, 0.5), 0.25),
            (bounds(0.25, 0.5), 0.25),
            (bounds(0.25, 0.5), 0.5),
        ]);
        assert_eq!((agg.lower, agg.upper), (0.25, 0.5));
    }

    #[test]
    fn uninformative_stratum_contributes_unit_interval() {
        let vacuous = BoundsResult::from_candidates(vec![], vec![], 2006, (0, 0));
        let agg = aggregate_bounds(&[(bounds(0.2, 0.4), 0.5), (vacuous, 0.5)]);
        assert!(!agg.informative);
        assert!((agg.lower - 0.1).abs() < 1e-15);
        assert!((agg.upper - 0.7).abs() < 1e-15);
    }
}
