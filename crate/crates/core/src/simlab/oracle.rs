//! Brute-force feasible range of the prevalence.
//!
//! Among survivors missing at the target wave, monotonicity pins the
//! outcome of some units: a positive observation earlier with only missing
//! cells since forces `Y_t = 1`, and a negative observation later with only
//! missing cells before forces `Y_t = 0`. Every other missing unit is free.
//! A full-data distribution consistent with the table is then described by
//! two unknowns, the positive shares `theta_mnar` and `theta_mar` among the
//! free MNAR and free MAR units. The oracle scans a grid over that unit
//! square, keeps the cells that touch the partial-MAR constraint
//! `P(Y_t=1, R_t=0) = pi * P(R_t=0)`, and reports the prevalence range
//! attained on them.

use serde::Serialize;

use crate::bounds::FrequencyTable;
use crate::error::ScenarioError;

const MIN_GRID_STEP: f64 = 1e-4;
const NEGATIVE_MASS_TOL: f64 = 1e-12;

/// Prevalence range over all full-data distributions consistent with a
/// table, up to the grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleRange {
    pub min_pi: f64,
    pub max_pi: f64,
    pub grid_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum OracleOutcome {
    Feasible(FeasibleRange),
    /// No distribution satisfies both assumptions and the observed table.
    Infeasible,
}

impl OracleOutcome {
    pub fn range(&self) -> Option<FeasibleRange> {
        match self {
            OracleOutcome::Feasible(r) => Some(*r),
            OracleOutcome::Infeasible => None,
        }
    }
}

/// Scans the grid of step `grid_step` over the two free shares.
pub fn oracle_range(ft: &FrequencyTable, grid_step: f64) -> Result<OracleOutcome, ScenarioError> {
    if !(MIN_GRID_STEP..=1.0).contains(&grid_step) {
        return Err(ScenarioError::Invalid(format!(
            "grid_step must lie in [{MIN_GRID_STEP}, 1], got {grid_step}"
        )));
    }
    if ft.survivors <= 0.0 {
        return Err(ScenarioError::Invalid("table has no survivors".into()));
    }
    let n = ft.survivors;
    let positive = ft.positive / n;
    let mar = ft.mar / n;
    let forced_pos_mnar = ft.past_mnar_total() / n;
    let forced_pos_mar = ft.past_mar_total() / n;
    let free_mnar = (ft.mnar - ft.past_mnar_total() - ft.future_mnar_total()) / n;
    let free_mar = (ft.mar - ft.past_mar_total() - ft.future_mar_total()) / n;
    if free_mnar < -NEGATIVE_MASS_TOL || free_mar < -NEGATIVE_MASS_TOL {
        // Some unit would need to be both positive and negative at t.
        return Ok(OracleOutcome::Infeasible);
    }
    let (free_mnar, free_mar) = (free_mnar.max(0.0), free_mar.max(0.0));

    let prevalence = |tm: f64, t0: f64| {
        positive + forced_pos_mnar + tm * free_mnar + forced_pos_mar + t0 * free_mar
    };
    let residual = |tm: f64, t0: f64| forced_pos_mar + t0 * free_mar - prevalence(tm, t0) * mar;

    let steps = (1.0 / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| (k as f64 * grid_step).min(1.0))
        .collect();
    let mut found = false;
    let mut min_pi = f64::INFINITY;
    let mut max_pi = f64::NEG_INFINITY;
    for i in 0..steps {
        let (m0, m1) = (grid[i], grid[i + 1]);
        for j in 0..steps {
            let (a0, a1) = (grid[j], grid[j + 1]);
            let corners = [(m0, a0), (m0, a1), (m1, a0), (m1, a1)];
            let res = corners.map(|(m, a)| residual(m, a));
            let lo = res.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = res.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo > 0.0 || hi < 0.0 {
                continue;
            }
            found = true;
            for (m, a) in corners {
                let p = prevalence(m, a);
                min_pi = min_pi.min(p);
                max_pi = max_pi.max(p);
            }
        }
    }
    Ok(if found {
        OracleOutcome::Feasible(FeasibleRange {
            min_pi: min_pi.clamp(0.0, 1.0),
            max_pi: max_pi.clamp(0.0, 1.0),
            grid_step,
        })
    } else {
        OracleOutcome::Infeasible
    })
}
