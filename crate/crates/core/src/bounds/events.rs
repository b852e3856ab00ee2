//! Per-unit event signatures and the frequency table built from them.
//!
//! Every survivor at the target wave contributes to a fixed set of joint
//! events: its response at the target wave, at most one past run event and at
//! most one future run event. A [`Signature`] records exactly that, so a
//! frequency table is a weighted sum of signatures. Sample tables weight by
//! unit counts and population tables by trajectory probabilities.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::EstimationError;
use crate::panel::{ClassifiedCell, IndicatorPanel, WaveLabel};

/// Response of a survivor at the target wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetResponse {
    Positive,
    Negative,
    Mar,
    Mnar,
}

/// Events a single survivor at the target wave belongs to.
///
/// `past_run = Some(i)`: the most recent observation among waves `t-1..t-I`
/// is at `t-i` and positive, with only missing cells in between.
/// `future_run = Some(j)`: the first observation among `t+1..t+J` is at
/// `t+j` and negative, with the unit alive and missing in between.
/// Runs are only tracked for units missing at the target wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub at_target: TargetResponse,
    pub past_run: Option<usize>,
    pub future_run: Option<usize>,
}

/// Computes the signature of one unit's cells, or `None` if the unit is dead
/// at the target index.
pub fn signature(
    cells: &[ClassifiedCell],
    target: usize,
    past: usize,
    future: usize,
) -> Option<Signature> {
    let at_target = match cells[target] {
        ClassifiedCell::Dead => return None,
        ClassifiedCell::Observed(true) => TargetResponse::Positive,
        ClassifiedCell::Observed(false) => TargetResponse::Negative,
        ClassifiedCell::Mar => TargetResponse::Mar,
        ClassifiedCell::Mnar => TargetResponse::Mnar,
    };
    if matches!(
        at_target,
        TargetResponse::Positive | TargetResponse::Negative
    ) {
        return Some(Signature {
            at_target,
            past_run: None,
            future_run: None,
        });
    }

    let mut past_run = None;
    for i in 1..=past {
        match cells[target - i] {
            ClassifiedCell::Observed(y) => {
                past_run = y.then_some(i);
                break;
            }
            ClassifiedCell::Mar | ClassifiedCell::Mnar => {}
            ClassifiedCell::Dead => break,
        }
    }

    let mut future_run = None;
    for j in 1..=future {
        match cells[target + j] {
            ClassifiedCell::Observed(y) => {
                future_run = (!y).then_some(j);
                break;
            }
            ClassifiedCell::Mar | ClassifiedCell::Mnar => {}
            ClassifiedCell::Dead => break,
        }
    }

    Some(Signature {
        at_target,
        past_run,
        future_run,
    })
}

/// Event masses among survivors at a target wave.
///
/// Masses are counts for sample tables and probabilities for population
/// tables. Every conditional frequency is a ratio of two masses and is formed
/// only when a bound is assembled.
///
/// `past_mnar[i - 1]` is the mass of
/// `{Y_{t-i}=1, R_{t-i}=1, R_{t-i+1..t-1} != 1, R_t=-1, S_t=1}`; `past_mar`
/// is the same with `R_t=0`. `future_mnar[j - 1]` is the mass of
/// `{Y_{t+j}=0, R_{t+j}=1, R_{t+1..t+j-1} != 1, R_t=-1, S_{t+j}=1}`;
/// `future_mar` the same with `R_t=0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub target_wave: WaveLabel,
    pub past: usize,
    pub future: usize,
    /// Mass of `S_t = 1`; the denominator of every frequency.
    pub survivors: f64,
    /// `Y_t = 1, R_t = 1`.
    pub positive: f64,
    /// `Y_t = 0, R_t = 1`.
    pub negative: f64,
    /// `R_t = 0`.
    pub mar: f64,
    /// `R_t = -1`.
    pub mnar: f64,
    pub past_mnar: Vec<f64>,
    pub past_mar: Vec<f64>,
    pub future_mnar: Vec<f64>,
    pub future_mar: Vec<f64>,
}

impl FrequencyTable {
    /// An empty table for the given horizons.
    pub fn zeroed(target_wave: WaveLabel, past: usize, future: usize) -> Self {
        Self {
            target_wave,
            past,
            future,
            survivors: 0.0,
            positive: 0.0,
            negative: 0.0,
            mar: 0.0,
            mnar: 0.0,
            past_mnar: vec![0.0; past],
            past_mar: vec![0.0; past],
            future_mnar: vec![0.0; future],
            future_mar: vec![0.0; future],
        }
    }

    /// Adds `mass` units (or probability) with the given signature.
    pub fn add(&mut self, sig: &Signature, mass: f64) {
        self.survivors += mass;
        let (past_slot, future_slot) = match sig.at_target {
            TargetResponse::Positive => {
                self.positive += mass;
                return;
            }
            TargetResponse::Negative => {
                self.negative += mass;
                return;
            }
            TargetResponse::Mar => {
                self.mar += mass;
                (&mut self.past_mar, &mut self.future_mar)
            }
            TargetResponse::Mnar => {
                self.mnar += mass;
                (&mut self.past_mnar, &mut self.future_mnar)
            }
        };
        if let Some(i) = sig.past_run {
            if i <= past_slot.len() {
                past_slot[i - 1] += mass;
            }
        }
        if let Some(j) = sig.future_run {
            if j <= future_slot.len() {
                future_slot[j - 1] += mass;
            }
        }
    }

    /// The same table with runs beyond the given horizons dropped.
    pub fn truncated(&self, past: usize, future: usize) -> Self {
        let mut t = self.clone();
        t.past = past.min(self.past);
        t.future = future.min(self.future);
        t.past_mnar.truncate(t.past);
        t.past_mar.truncate(t.past);
        t.future_mnar.truncate(t.future);
        t.future_mar.truncate(t.future);
        t
    }

    /// Mass of `R_t = 1`.
    pub fn observed(&self) -> f64 {
        self.positive + self.negative
    }

    /// Mass of `R_t != 0` among survivors, the denominator of the
    /// single-wave sharpened ratios.
    pub fn not_mar(&self) -> f64 {
        self.survivors - self.mar
    }

    /// Conditional frequency of a mass given survival.
    pub fn freq(&self, mass: f64) -> f64 {
        mass / self.survivors
    }

    pub fn past_mnar_total(&self) -> f64 {
        self.past_mnar.iter().sum()
    }

    pub fn past_mar_total(&self) -> f64 {
        self.past_mar.iter().sum()
    }

    pub fn future_mnar_total(&self) -> f64 {
        self.future_mnar.iter().sum()
    }

    pub fn future_mar_total(&self) -> f64 {
        self.future_mar.iter().sum()
    }

    /// Checks that every event mass lies in `[0, survivors]` and that the
    /// response categories partition the survivors (up to `tol`).
    pub fn is_consistent(&self, tol: f64) -> bool {
        let within = |m: f64| m >= -tol && m <= self.survivors + tol;
        let parts = self.positive + self.negative + self.mar + self.mnar;
        self.survivors > 0.0
            && [self.positive, self.negative, self.mar, self.mnar]
                .into_iter()
                .chain(self.past_mnar.iter().copied())
                .chain(self.past_mar.iter().copied())
                .chain(self.future_mnar.iter().copied())
                .chain(self.future_mar.iter().copied())
                .all(within)
            && (parts - self.survivors).abs() <= tol.max(1e-12 * self.survivors)
            && self.past_mnar_total() <= self.mnar + tol
            && self.past_mar_total() <= self.mar + tol
            && self.future_mnar_total() <= self.mnar + tol
            && self.future_mar_total() <= self.mar + tol
    }
}

/// Distinct signatures of a panel with their unit counts, plus the number of
/// units dead at the target wave. Sufficient for both the point table and
/// every bootstrap table.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureCounts {
    pub target_wave: WaveLabel,
    pub past: usize,
    pub future: usize,
    /// Units not alive at the target wave.
    pub dead: u64,
    pub patterns: Vec<(Signature, u64)>,
}

impl SignatureCounts {
    pub fn from_panel(
        ip: &IndicatorPanel,
        target_wave: WaveLabel,
        past: usize,
        future: usize,
    ) -> Result<Self, EstimationError> {
        let t = horizon_index(ip, target_wave, past, future)?;
        let mut tally: BTreeMap<Signature, u64> = BTreeMap::new();
        let mut dead = 0;
        for unit in ip.units() {
            match signature(&unit.cells, t, past, future) {
                Some(sig) => *tally.entry(sig).or_default() += 1,
                None => dead += 1,
            }
        }
        Ok(Self {
            target_wave,
            past,
            future,
            dead,
            patterns: tally.into_iter().collect(),
        })
    }

    pub fn units(&self) -> u64 {
        self.dead + self.patterns.iter().map(|(_, c)| c).sum::<u64>()
    }

    pub fn table(&self) -> FrequencyTable {
        let counts: Vec<u64> = self.patterns.iter().map(|(_, c)| *c).collect();
        self.table_with_counts(&counts)
    }

    /// Table for alternative pattern counts (same order as `patterns`).
    pub fn table_with_counts(&self, counts: &[u64]) -> FrequencyTable {
        let mut table = FrequencyTable::zeroed(self.target_wave, self.past, self.future);
        for ((sig, _), &c) in self.patterns.iter().zip(counts) {
            if c > 0 {
                table.add(sig, c as f64);
            }
        }
        table
    }
}

/// Resolves the target index and checks the horizon stays inside the panel.
fn horizon_index(
    ip: &IndicatorPanel,
    target_wave: WaveLabel,
    past: usize,
    future: usize,
) -> Result<usize, EstimationError> {
    let t = ip
        .wave_index(target_wave)
        .ok_or(EstimationError::UnknownWave(target_wave))?;
    if past > t || t + future >= ip.waves().len() {
        return Err(EstimationError::HorizonOutOfRange {
            wave: target_wave,
            past,
            future,
        });
    }
    Ok(t)
}

/// Exact event counts among survivors at `target_wave` using `past` earlier
/// and `future` later waves.
pub fn frequencies(
    ip: &IndicatorPanel,
    target_wave: WaveLabel,
    past: usize,
    future: usize,
) -> Result<FrequencyTable, EstimationError> {
    let table = SignatureCounts::from_panel(ip, target_wave, past, future)?.table();
    if table.survivors == 0.0 {
        return Err(EstimationError::EmptySurvivorSet(target_wave));
    }
    Ok(table)
}
