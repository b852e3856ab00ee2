//! Longitudinal unit records, validation, and missing-type classification.
//!
//! A [`Panel`] stores raw cells (dead, observed outcome, or missing with a
//! reason label). [`classify`] turns the reason labels into the four-valued
//! response indicator used by the estimators, producing an
//! [`IndicatorPanel`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, PanelError};

/// Integer time label of a wave, e.g. a survey year.
pub type WaveLabel = i64;

/// Raw status of one unit at one wave.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellStatus {
    Dead,
    /// Alive with the binary outcome recorded (`true` = 1).
    Observed(bool),
    /// Alive, outcome missing for the given reason.
    Missing(String),
}

impl CellStatus {
    pub fn is_alive(&self) -> bool {
        !matches!(self, CellStatus::Dead)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRecord {
    pub id: String,
    pub strata: BTreeMap<String, String>,
    pub cells: Vec<CellStatus>,
}

/// An immutable, structurally valid collection of unit records.
///
/// Structural validity (one cell per wave, identical strata keys, ordered
/// waves) is enforced on construction. Substantive checks (absorbing death,
/// monotone outcomes) live in [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    waves: Vec<WaveLabel>,
    units: Vec<UnitRecord>,
    vocabulary: BTreeSet<String>,
}

impl Panel {
    pub fn new(waves: Vec<WaveLabel>, units: Vec<UnitRecord>) -> Result<Self, PanelError> {
        check_waves(&waves)?;
        let mut seen = BTreeSet::new();
        let keys: Option<Vec<&String>> = units.first().map(|u| u.strata.keys().collect());
        for unit in &units {
            if unit.cells.len() != waves.len() {
                return Err(PanelError::CellCount {
                    unit: unit.id.clone(),
                    got: unit.cells.len(),
                    expected: waves.len(),
                });
            }
            if let Some(keys) = &keys {
                if !unit.strata.keys().eq(keys.iter().copied()) {
                    return Err(PanelError::StrataKeys {
                        unit: unit.id.clone(),
                    });
                }
            }
            if !seen.insert(unit.id.as_str()) {
                return Err(PanelError::DuplicateUnit(unit.id.clone()));
            }
        }
        let vocabulary = units
            .iter()
            .flat_map(|u| u.cells.iter())
            .filter_map(|c| match c {
                CellStatus::Missing(reason) => Some(reason.clone()),
                _ => None,
            })
            .collect();
        Ok(Self {
            waves,
            units,
            vocabulary,
        })
    }

    /// Adds reason labels that are legal in a classification even if no cell
    /// carries them.
    pub fn with_vocabulary<I, S>(mut self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.vocabulary.extend(extra.into_iter().map(Into::into));
        self
    }

    pub fn waves(&self) -> &[WaveLabel] {
        &self.waves
    }

    pub fn units(&self) -> &[UnitRecord] {
        &self.units
    }

    pub fn reason_vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn wave_index(&self, label: WaveLabel) -> Option<usize> {
        self.waves.iter().position(|&w| w == label)
    }

    pub fn covariate_names(&self) -> Vec<String> {
        self.units
            .first()
            .map(|u| u.strata.keys().cloned().collect())
            .unwrap_or_default()
    }

    /// Keeps only units for which `keep` returns true. The vocabulary is kept
    /// as is so that classifications stay valid.
    pub fn retain_units<F: FnMut(&UnitRecord) -> bool>(&self, mut keep: F) -> Panel {
        Panel {
            waves: self.waves.clone(),
            units: self.units.iter().filter(|u| keep(u)).cloned().collect(),
            vocabulary: self.vocabulary.clone(),
        }
    }

    pub fn without_units(&self, ids: &BTreeSet<String>) -> Panel {
        self.retain_units(|u| !ids.contains(&u.id))
    }

    /// Per-wave cell counts over all units in the panel.
    pub fn wave_summary(&self) -> Vec<WaveSummary> {
        self.waves
            .iter()
            .enumerate()
            .map(|(k, &wave)| {
                let mut summary = WaveSummary {
                    wave,
                    units: self.units.len(),
                    ..WaveSummary::default()
                };
                for unit in &self.units {
                    match &unit.cells[k] {
                        CellStatus::Dead => summary.dead += 1,
                        CellStatus::Observed(_) => summary.observed += 1,
                        CellStatus::Missing(_) => summary.missing += 1,
                    }
                }
                summary
            })
            .collect()
    }

    /// Partitions units by the given covariates; weights are stratum size
    /// over panel size.
    pub fn stratify(&self, covariates: &[String]) -> Result<Vec<Stratum<Panel>>, PanelError> {
        let groups = group_by_strata(&self.units, |u| &u.strata, covariates)?;
        let total = self.units.len();
        Ok(groups
            .into_iter()
            .map(|(key, units)| Stratum {
                key,
                size: units.len(),
                total,
                panel: Panel {
                    waves: self.waves.clone(),
                    units,
                    vocabulary: self.vocabulary.clone(),
                },
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WaveSummary {
    pub wave: WaveLabel,
    pub units: usize,
    pub observed: usize,
    pub missing: usize,
    pub dead: usize,
}

impl WaveSummary {
    /// Missing cells over all units (including those dead at this wave).
    pub fn missing_proportion(&self) -> f64 {
        if self.units == 0 {
            0.0
        } else {
            self.missing as f64 / self.units as f64
        }
    }
}

fn check_waves(waves: &[WaveLabel]) -> Result<(), PanelError> {
    if waves.is_empty() {
        return Err(PanelError::NoWaves);
    }
    for pair in waves.windows(2) {
        if pair[1] <= pair[0] {
            return Err(PanelError::UnorderedWaves {
                prev: pair[0],
                next: pair[1],
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// Unit alive-coded after a wave at which it was recorded dead.
    DeathNotAbsorbing {
        died_at: WaveLabel,
        alive_at: WaveLabel,
    },
    /// Observed outcome went from 1 back to 0.
    NonMonotoneOutcome {
        positive_at: WaveLabel,
        negative_at: WaveLabel,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub unit_id: String,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn offenders(&self, pred: impl Fn(&ViolationKind) -> bool) -> BTreeSet<String> {
        self.violations
            .iter()
            .filter(|v| pred(&v.kind))
            .map(|v| v.unit_id.clone())
            .collect()
    }

    pub fn monotonicity_offenders(&self) -> BTreeSet<String> {
        self.offenders(|k| matches!(k, ViolationKind::NonMonotoneOutcome { .. }))
    }

    pub fn death_offenders(&self) -> BTreeSet<String> {
        self.offenders(|k| matches!(k, ViolationKind::DeathNotAbsorbing { .. }))
    }
}

/// Scans every unit for non-absorbing death and for an observed outcome that
/// drops from 1 to 0. One violation is reported per offending later cell.
pub fn validate(panel: &Panel) -> ValidationReport {
    let waves = panel.waves();
    let mut violations = Vec::new();
    for unit in panel.units() {
        let mut died_at = None;
        let mut last_positive = None;
        for (k, cell) in unit.cells.iter().enumerate() {
            match (cell, died_at) {
                (CellStatus::Dead, None) => died_at = Some(k),
                (CellStatus::Dead, Some(_)) => {}
                (_, Some(d)) => violations.push(Violation {
                    unit_id: unit.id.clone(),
                    kind: ViolationKind::DeathNotAbsorbing {
                        died_at: waves[d],
                        alive_at: waves[k],
                    },
                }),
                _ => {}
            }
            match cell {
                CellStatus::Observed(true) => last_positive = Some(k),
                CellStatus::Observed(false) => {
                    if let Some(p) = last_positive {
                        violations.push(Violation {
                            unit_id: unit.id.clone(),
                            kind: ViolationKind::NonMonotoneOutcome {
                                positive_at: waves[p],
                                negative_at: waves[k],
                            },
                        });
                    }
                }
                _ => {}
            }
        }
    }
    ValidationReport { violations }
}

// ---------------------------------------------------------------------------
// Classification

/// Reason labels treated as missing at random; every other reason is
/// treated as missing not at random.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub mar_reasons: BTreeSet<String>,
}

impl Classification {
    pub fn new<I, S>(mar_reasons: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            mar_reasons: mar_reasons.into_iter().map(Into::into).collect(),
        }
    }

    /// Every missing cell is MNAR: the binary-indicator analysis.
    pub fn all_mnar() -> Self {
        Self::default()
    }

    pub fn is_mar(&self, reason: &str) -> bool {
        self.mar_reasons.contains(reason)
    }
}

/// Four-valued response indicator: observed (1), MNAR (-1), MAR (0), dead (*).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MissingIndicator {
    Observed,
    Mnar,
    Mar,
    Dead,
}

impl MissingIndicator {
    /// Numeric code, `None` for dead.
    pub fn code(self) -> Option<i8> {
        match self {
            MissingIndicator::Observed => Some(1),
            MissingIndicator::Mnar => Some(-1),
            MissingIndicator::Mar => Some(0),
            MissingIndicator::Dead => None,
        }
    }

    /// Binary indicator that ignores the missing type: 1 observed, 0 missing.
    pub fn coarsened(self) -> Option<u8> {
        match self {
            MissingIndicator::Observed => Some(1),
            MissingIndicator::Mnar | MissingIndicator::Mar => Some(0),
            MissingIndicator::Dead => None,
        }
    }
}

/// A cell after classification. The outcome is present iff observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClassifiedCell {
    Observed(bool),
    Mnar,
    Mar,
    Dead,
}

impl ClassifiedCell {
    pub fn indicator(self) -> MissingIndicator {
        match self {
            ClassifiedCell::Observed(_) => MissingIndicator::Observed,
            ClassifiedCell::Mnar => MissingIndicator::Mnar,
            ClassifiedCell::Mar => MissingIndicator::Mar,
            ClassifiedCell::Dead => MissingIndicator::Dead,
        }
    }

    pub fn outcome(self) -> Option<bool> {
        match self {
            ClassifiedCell::Observed(y) => Some(y),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorUnit {
    pub id: String,
    pub strata: BTreeMap<String, String>,
    pub cells: Vec<ClassifiedCell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorPanel {
    waves: Vec<WaveLabel>,
    units: Vec<IndicatorUnit>,
}

impl IndicatorPanel {
    /// Builds an indicator panel directly, e.g. from simulated trajectories.
    pub fn from_units(
        waves: Vec<WaveLabel>,
        units: Vec<IndicatorUnit>,
    ) -> Result<Self, PanelError> {
        check_waves(&waves)?;
        if let Some(unit) = units.iter().find(|u| u.cells.len() != waves.len()) {
            return Err(PanelError::CellCount {
                unit: unit.id.clone(),
                got: unit.cells.len(),
                expected: waves.len(),
            });
        }
        Ok(Self { waves, units })
    }

    pub fn waves(&self) -> &[WaveLabel] {
        &self.waves
    }

    pub fn units(&self) -> &[IndicatorUnit] {
        &self.units
    }

    pub fn wave_index(&self, label: WaveLabel) -> Option<usize> {
        self.waves.iter().position(|&w| w == label)
    }

    pub fn stratify(
        &self,
        covariates: &[String],
    ) -> Result<Vec<Stratum<IndicatorPanel>>, PanelError> {
        let groups = group_by_strata(&self.units, |u| &u.strata, covariates)?;
        let total = self.units.len();
        Ok(groups
            .into_iter()
            .map(|(key, units)| Stratum {
                key,
                size: units.len(),
                total,
                panel: IndicatorPanel {
                    waves: self.waves.clone(),
                    units,
                },
            })
            .collect())
    }

    /// Units alive at the wave with the given index.
    pub fn survivors_at(&self, index: usize) -> usize {
        self.units
            .iter()
            .filter(|u| u.cells[index] != ClassifiedCell::Dead)
            .count()
    }
}

/// Maps every cell to its response indicator under `cls`.
///
/// Fails if `cls` names a reason outside the panel vocabulary. Reasons in
/// the data that `cls` does not mention are MNAR.
pub fn classify(panel: &Panel, cls: &Classification) -> Result<IndicatorPanel, ConfigError> {
    if let Some(unknown) = cls
        .mar_reasons
        .iter()
        .find(|r| !panel.reason_vocabulary().contains(*r))
    {
        return Err(ConfigError::UnknownReason(unknown.clone()));
    }
    let units = panel
        .units()
        .iter()
        .map(|u| IndicatorUnit {
            id: u.id.clone(),
            strata: u.strata.clone(),
            cells: u
                .cells
                .iter()
                .map(|c| match c {
                    CellStatus::Dead => ClassifiedCell::Dead,
                    CellStatus::Observed(y) => ClassifiedCell::Observed(*y),
                    CellStatus::Missing(reason) if cls.is_mar(reason) => ClassifiedCell::Mar,
                    CellStatus::Missing(_) => ClassifiedCell::Mnar,
                })
                .collect(),
        })
        .collect();
    Ok(IndicatorPanel {
        waves: panel.waves().to_vec(),
        units,
    })
}

// ---------------------------------------------------------------------------
// Stratification

/// Ordered `(covariate, level)` pairs identifying a stratum. Empty for the
/// whole panel.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StratumKey(pub Vec<(String, String)>);

impl fmt::Display for StratumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("all");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct Stratum<P> {
    pub key: StratumKey,
    pub size: usize,
    pub total: usize,
    pub panel: P,
}

impl<P> Stratum<P> {
    /// Sample frequency of the stratum, `size / total`.
    pub fn weight(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.size as f64 / self.total as f64
        }
    }
}

/// Weights proportional to the number of survivors at wave `index` in each
/// stratum. These estimate the stratum shares of the survivor population and
/// coincide with [`Stratum::weight`] when nobody has died by that wave.
pub fn survivor_weights(strata: &[Stratum<IndicatorPanel>], index: usize) -> Vec<f64> {
    let counts: Vec<usize> = strata.iter().map(|s| s.panel.survivors_at(index)).collect();
    let total: usize = counts.iter().sum();
    counts
        .into_iter()
        .map(|c| {
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        })
        .collect()
}

fn group_by_strata<U: Clone>(
    units: &[U],
    strata_of: impl Fn(&U) -> &BTreeMap<String, String>,
    covariates: &[String],
) -> Result<Vec<(StratumKey, Vec<U>)>, PanelError> {
    if covariates.is_empty() {
        return Ok(vec![(StratumKey::default(), units.to_vec())]);
    }
    let mut groups: BTreeMap<StratumKey, Vec<U>> = BTreeMap::new();
    for unit in units {
        let strata = strata_of(unit);
        let mut key = Vec::with_capacity(covariates.len());
        for name in covariates {
            let level = strata
                .get(name)
                .ok_or_else(|| PanelError::UnknownCovariate(name.clone()))?;
            key.push((name.clone(), level.clone()));
        }
        groups
            .entry(StratumKey(key))
            .or_default()
            .push(unit.clone());
    }
    if units.is_empty() {
        return Ok(vec![(StratumKey::default(), Vec::new())]);
    }
    Ok(groups.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(id: &str, cells: Vec<CellStatus>) -> UnitRecord {
        UnitRecord {
            id: id.into(),
            strata: BTreeMap::new(),
            cells,
        }
    }

    fn miss(r: &str) -> CellStatus {
        CellStatus::Missing(r.into())
    }

    #[test]
    fn monotonicity_violation_is_flagged_once() {
        let p = Panel::new(
            vec![2004, 2006],
            vec![unit(
                "u1",
                vec![CellStatus::Observed(true), CellStatus::Observed(false)],
            )],
        )
        .unwrap();
        let report = validate(&p);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0].kind,
            ViolationKind::NonMonotoneOutcome {
                positive_at: 2004,
                negative_at: 2006
            }
        );
    }

    #[test]
    fn resurrection_is_flagged_once() {
        let p = Panel::new(
            vec![2004, 2006, 2008],
            vec![unit(
                "u1",
                vec![
                    miss("refused"),
                    CellStatus::Dead,
                    CellStatus::Observed(false),
                ],
            )],
        )
        .unwrap();
        let report = validate(&p);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.death_offenders().len(), 1);
        assert!(report.monotonicity_offenders().is_empty());
    }

    #[test]
    fn monotone_panel_is_clean() {
        let p = Panel::new(
            vec![1, 2, 3],
            vec![
                unit(
                    "a",
                    vec![
                        CellStatus::Observed(false),
                        CellStatus::Observed(false),
                        CellStatus::Observed(true),
                    ],
                ),
                unit(
                    "b",
                    vec![
                        CellStatus::Observed(true),
                        CellStatus::Observed(true),
                        CellStatus::Observed(true),
                    ],
                ),
            ],
        )
        .unwrap();
        assert!(validate(&p).is_clean());
    }

    #[test]
    fn structural_errors() {
        assert_eq!(Panel::new(vec![], vec![]), Err(PanelError::NoWaves));
        assert!(matches!(
            Panel::new(vec![2, 1], vec![]),
            Err(PanelError::UnorderedWaves { .. })
        ));
        assert!(matches!(
            Panel::new(vec![1, 2], vec![unit("x", vec![CellStatus::Dead])]),
            Err(PanelError::CellCount { .. })
        ));
        assert!(matches!(
            Panel::new(
                vec![1],
                vec![
                    unit("x", vec![CellStatus::Dead]),
                    unit("x", vec![CellStatus::Dead])
                ]
            ),
            Err(PanelError::DuplicateUnit(_))
        ));
    }

    #[test]
    fn classify_follows_mar_set() {
        let p = Panel::new(
            vec![1, 2, 3],
            vec![unit(
                "u",
                vec![miss("refused"), miss("moved"), CellStatus::Observed(true)],
            )],
        )
        .unwrap()
        .with_vocabulary(["temporarily absent", "results lost", "not known"]);
        let cls = Classification::new(["moved", "temporarily absent", "results lost", "not known"]);
        let ip = classify(&p, &cls).unwrap();
        assert_eq!(
            ip.units()[0].cells,
            vec![
                ClassifiedCell::Mnar,
                ClassifiedCell::Mar,
                ClassifiedCell::Observed(true)
            ]
        );

        let ip = classify(&p, &Classification::all_mnar()).unwrap();
        assert_eq!(
            ip.units()[0].cells,
            vec![
                ClassifiedCell::Mnar,
                ClassifiedCell::Mnar,
                ClassifiedCell::Observed(true)
            ]
        );

        assert_eq!(
            classify(&p, &Classification::new(["abducted"])),
            Err(ConfigError::UnknownReason("abducted".into()))
        );
    }

    #[test]
    fn indicator_codes() {
        assert_eq!(MissingIndicator::Mnar.code(), Some(-1));
        assert_eq!(MissingIndicator::Mar.coarsened(), Some(0));
        assert_eq!(MissingIndicator::Dead.coarsened(), None);
        assert_eq!(ClassifiedCell::Dead.indicator(), MissingIndicator::Dead);
    }

    #[test]
    fn stratify_weights() {
        let mk = |id: &str, g: &str| UnitRecord {
            id: id.into(),
            strata: BTreeMap::from([("gender".to_string(), g.to_string())]),
            cells: vec![CellStatus::Observed(false)],
        };
        let p = Panel::new(vec![1], vec![mk("a", "f"), mk("b", "m")]).unwrap();
        let strata = p.stratify(&["gender".into()]).unwrap();
        let w: Vec<f64> = strata.iter().map(|s| s.weight()).collect();
        assert_eq!(w, vec![0.5, 0.5]);
        assert_eq!(strata[0].key.to_string(), "gender=f");

        let all = p.stratify(&[]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].weight(), 1.0);
        assert_eq!(all[0].key.to_string(), "all");

        assert_eq!(
            p.stratify(&["region".into()]).unwrap_err(),
            PanelError::UnknownCovariate("region".into())
        );
    }

    #[test]
    fn missing_proportions() {
        let p = Panel::new(
            vec![1, 2],
            vec![
                unit("a", vec![miss("x"), CellStatus::Dead]),
                unit("b", vec![CellStatus::Observed(true), miss("x")]),
            ],
        )
        .unwrap();
        let s = p.wave_summary();
        assert_eq!(s[0].missing, 1);
        assert_eq!(s[1].dead, 1);
        assert_eq!(s[1].missing_proportion(), 0.5);
    }
}
