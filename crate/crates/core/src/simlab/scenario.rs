//! Finite-state synthetic populations.
//!
//! A unit's state at each wave is dead or alive with a binary outcome and a
//! response in {MNAR, MAR, observed}. Between waves a live unit first dies
//! with a hazard that may depend on its current outcome; a survivor then
//! becomes positive with the infection hazard (positives stay positive) and
//! draws its next response from a kernel indexed by the new outcome and the
//! previous response.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{signature, FrequencyTable};
use crate::error::{EstimationError, PanelError, ScenarioError};
use crate::panel::{CellStatus, Classification, ClassifiedCell, Panel, UnitRecord, WaveLabel};

/// Probabilities of (MNAR, MAR, observed).
pub type ResponseProbs = [f64; 3];

const PROB_TOL: f64 = 1e-9;

/// Response of a live unit at one wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Response {
    Mnar,
    Mar,
    Observed,
}

impl Response {
    const ALL: [Response; 3] = [Response::Mnar, Response::Mar, Response::Observed];

    fn index(self) -> usize {
        match self {
            Response::Mnar => 0,
            Response::Mar => 1,
            Response::Observed => 2,
        }
    }
}

/// A value for each outcome level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ByOutcome<T> {
    pub negative: T,
    pub positive: T,
}

impl<T> ByOutcome<T> {
    pub fn both(value: T) -> Self
    where
        T: Clone,
    {
        Self {
            negative: value.clone(),
            positive: value,
        }
    }

    pub fn get(&self, y: bool) -> &T {
        if y {
            &self.positive
        } else {
            &self.negative
        }
    }
}

/// Next-response distributions by previous response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FromPrevious {
    pub from_mnar: ResponseProbs,
    pub from_mar: ResponseProbs,
    pub from_observed: ResponseProbs,
}

impl FromPrevious {
    pub fn get(&self, prev: Response) -> &ResponseProbs {
        match prev {
            Response::Mnar => &self.from_mnar,
            Response::Mar => &self.from_mar,
            Response::Observed => &self.from_observed,
        }
    }

    fn rows(&self) -> [(&'static str, &ResponseProbs); 3] {
        [
            ("from_mnar", &self.from_mnar),
            ("from_mar", &self.from_mar),
            ("from_observed", &self.from_observed),
        ]
    }
}

/// Either one value for every between-wave transition or one per transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerWave<T> {
    Each(Vec<T>),
    Constant(T),
}

impl<T> PerWave<T> {
    /// Value for the transition from wave index `i` to `i + 1`.
    pub fn get(&self, i: usize) -> &T {
        match self {
            PerWave::Constant(v) => v,
            PerWave::Each(v) => &v[i],
        }
    }

    fn check_len(&self, field: &str, transitions: usize) -> Result<(), ScenarioError> {
        match self {
            PerWave::Each(v) if v.len() != transitions => Err(ScenarioError::Length {
                field: field.into(),
                got: v.len(),
                expected: transitions,
            }),
            _ => Ok(()),
        }
    }

    fn values(&self) -> Vec<&T> {
        match self {
            PerWave::Constant(v) => vec![v],
            PerWave::Each(v) => v.iter().collect(),
        }
    }
}

fn default_mnar_reasons() -> Vec<String> {
    vec!["refused".into()]
}

fn default_mar_reasons() -> Vec<String> {
    vec!["moved".into()]
}

/// A synthetic population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub waves: usize,
    /// Wave labels; `0, 1, ...` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave_labels: Option<Vec<WaveLabel>>,
    pub initial_prevalence: f64,
    pub infection_hazard: PerWave<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death_hazard: Option<PerWave<ByOutcome<f64>>>,
    pub initial_response: ByOutcome<ResponseProbs>,
    pub response_kernel: PerWave<ByOutcome<FromPrevious>>,
    /// Declares that `P(R_t = 0 | Y_t, S_t = 1)` does not depend on `Y_t`
    /// at any wave. Checked by [`Scenario::validate`].
    pub mar_holds: bool,
    /// Reason labels drawn uniformly for MNAR cells.
    #[serde(default = "default_mnar_reasons")]
    pub mnar_reasons: Vec<String>,
    /// Reason labels drawn uniformly for MAR cells.
    #[serde(default = "default_mar_reasons")]
    pub mar_reasons: Vec<String>,
}

/// One trajectory of the finite chain with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// Outcome at each wave, `None` once dead.
    pub outcomes: Vec<Option<bool>>,
    pub cells: Vec<ClassifiedCell>,
    pub probability: f64,
}

fn check_prob(field: &str, value: f64) -> Result<(), ScenarioError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ScenarioError::Probability {
            field: field.into(),
            value,
        })
    }
}

fn check_row(field: &str, row: &ResponseProbs) -> Result<(), ScenarioError> {
    for p in row {
        check_prob(field, *p)?;
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(ScenarioError::RowSum {
            field: field.into(),
            sum,
        });
    }
    Ok(())
}

fn cell(y: bool, r: Response) -> ClassifiedCell {
    match r {
        Response::Mnar => ClassifiedCell::Mnar,
        Response::Mar => ClassifiedCell::Mar,
        Response::Observed => ClassifiedCell::Observed(y),
    }
}

fn draw_response<R: Rng + ?Sized>(row: &ResponseProbs, rng: &mut R) -> Response {
    let u: f64 = rng.random();
    if u < row[0] {
        Response::Mnar
    } else if u < row[0] + row[1] {
        Response::Mar
    } else {
        Response::Observed
    }
}

/// A trajectory prefix: outcomes, cells, last response while alive, mass.
type Partial = (Vec<Option<bool>>, Vec<ClassifiedCell>, Option<Response>, f64);

impl Scenario {
    /// The two-wave population of the falsification example: prevalence
    /// 2/5, infection hazard 1/6, and a response process that is not MAR.
    pub fn example_one() -> Self {
        let rows = FromPrevious {
            from_mnar: [0.0, 0.5, 0.5],
            from_mar: [0.0, 0.0, 1.0],
            from_observed: [0.0, 0.5, 0.5],
        };
        Scenario {
            waves: 2,
            wave_labels: None,
            initial_prevalence: 0.4,
            infection_hazard: PerWave::Constant(1.0 / 6.0),
            death_hazard: None,
            initial_response: ByOutcome {
                negative: [0.5, 0.5, 0.0],
                positive: [0.0, 0.25, 0.75],
            },
            response_kernel: PerWave::Constant(ByOutcome::both(rows)),
            mar_holds: false,
            mnar_reasons: default_mnar_reasons(),
            mar_reasons: default_mar_reasons(),
        }
    }

    pub fn labels(&self) -> Vec<WaveLabel> {
        self.wave_labels
            .clone()
            .unwrap_or_else(|| (0..self.waves as WaveLabel).collect())
    }

    /// MAR reasons of the scenario as a classification.
    pub fn classification(&self) -> Classification {
        Classification::new(self.mar_reasons.iter().cloned())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.waves == 0 {
            return Err(ScenarioError::NoWaves);
        }
        let transitions = self.waves - 1;
        if let Some(labels) = &self.wave_labels {
            if labels.len() != self.waves {
                return Err(ScenarioError::Length {
                    field: "wave_labels".into(),
                    got: labels.len(),
                    expected: self.waves,
                });
            }
            if labels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ScenarioError::Invalid(
                    "wave_labels must be strictly increasing".into(),
                ));
            }
        }
        check_prob("initial_prevalence", self.initial_prevalence)?;
        self.infection_hazard
            .check_len("infection_hazard", transitions)?;
        for h in self.infection_hazard.values() {
            check_prob("infection_hazard", *h)?;
        }
        if let Some(death) = &self.death_hazard {
            death.check_len("death_hazard", transitions)?;
            for d in death.values() {
                check_prob("death_hazard.negative", d.negative)?;
                check_prob("death_hazard.positive", d.positive)?;
            }
        }
        check_row("initial_response.negative", &self.initial_response.negative)?;
        check_row("initial_response.positive", &self.initial_response.positive)?;
        self.response_kernel
            .check_len("response_kernel", transitions)?;
        for k in self.response_kernel.values() {
            for (side, rows) in [("negative", &k.negative), ("positive", &k.positive)] {
                for (name, row) in rows.rows() {
                    check_row(&format!("response_kernel.{side}.{name}"), row)?;
                }
            }
        }
        if self.mnar_reasons.is_empty() || self.mar_reasons.is_empty() {
            return Err(ScenarioError::Invalid(
                "mnar_reasons and mar_reasons must be nonempty".into(),
            ));
        }
        if self.mar_holds {
            let paths = self.paths();
            for (i, label) in self.labels().into_iter().enumerate() {
                let gap = mar_gap_at(&paths, i);
                if gap > 1e-9 {
                    return Err(ScenarioError::MarFlag { wave: label, gap });
                }
            }
        }
        Ok(())
    }

    fn index_of(&self, wave: WaveLabel) -> Result<usize, EstimationError> {
        self.labels()
            .iter()
            .position(|&w| w == wave)
            .ok_or(EstimationError::UnknownWave(wave))
    }

    fn death(&self, i: usize, y: bool) -> f64 {
        self.death_hazard.as_ref().map_or(0.0, |d| *d.get(i).get(y))
    }

    /// Every trajectory with positive probability.
    pub fn paths(&self) -> Vec<Path> {
        let mut frontier: Vec<Partial> = Vec::new();
        for y in [false, true] {
            let py = if y {
                self.initial_prevalence
            } else {
                1.0 - self.initial_prevalence
            };
            for r in Response::ALL {
                let p = py * self.initial_response.get(y)[r.index()];
                if p > 0.0 {
                    frontier.push((vec![Some(y)], vec![cell(y, r)], Some(r), p));
                }
            }
        }
        for i in 0..self.waves.saturating_sub(1) {
            let mut next = Vec::with_capacity(frontier.len() * 4);
            for (ys, cells, prev, p) in frontier {
                let (Some(y), Some(prev)) = (ys[i], prev) else {
                    let mut ys = ys;
                    let mut cells = cells;
                    ys.push(None);
                    cells.push(ClassifiedCell::Dead);
                    next.push((ys, cells, None, p));
                    continue;
                };
                let die = self.death(i, y);
                if die > 0.0 {
                    let mut ys = ys.clone();
                    let mut cells = cells.clone();
                    ys.push(None);
                    cells.push(ClassifiedCell::Dead);
                    next.push((ys, cells, None, p * die));
                }
                let hazard = *self.infection_hazard.get(i);
                let outcomes = if y {
                    [(true, 1.0), (false, 0.0)]
                } else {
                    [(true, hazard), (false, 1.0 - hazard)]
                };
                for (y_next, py) in outcomes {
                    let row = self.response_kernel.get(i).get(y_next).get(prev);
                    for r in Response::ALL {
                        let q = p * (1.0 - die) * py * row[r.index()];
                        if q > 0.0 {
                            let mut ys = ys.clone();
                            let mut cells = cells.clone();
                            ys.push(Some(y_next));
                            cells.push(cell(y_next, r));
                            next.push((ys, cells, Some(r), q));
                        }
                    }
                }
            }
            frontier = next;
        }
        frontier
            .into_iter()
            .map(|(outcomes, cells, _, probability)| Path {
                outcomes,
                cells,
                probability,
            })
            .collect()
    }

    /// `P(S_t = 1)`.
    pub fn survival(&self, wave: WaveLabel) -> Result<f64, EstimationError> {
        let i = self.index_of(wave)?;
        Ok(self
            .paths()
            .iter()
            .filter(|p| p.outcomes[i].is_some())
            .map(|p| p.probability)
            .sum())
    }

    /// `P(Y_t = 1 | S_t = 1)`.
    pub fn true_prevalence(&self, wave: WaveLabel) -> Result<f64, EstimationError> {
        let i = self.index_of(wave)?;
        let paths = self.paths();
        let alive: f64 = paths
            .iter()
            .filter(|p| p.outcomes[i].is_some())
            .map(|p| p.probability)
            .sum();
        if alive <= 0.0 {
            return Err(EstimationError::EmptySurvivorSet(wave));
        }
        let positive: f64 = paths
            .iter()
            .filter(|p| p.outcomes[i] == Some(true))
            .map(|p| p.probability)
            .sum();
        Ok(positive / alive)
    }

    /// `|P(Y_t=1 | R_t=0, S_t=1) - P(Y_t=1 | S_t=1)|`, zero when nobody is
    /// MAR at the wave.
    pub fn mar_gap(&self, wave: WaveLabel) -> Result<f64, EstimationError> {
        let i = self.index_of(wave)?;
        Ok(mar_gap_at(&self.paths(), i))
    }

    /// Exact event probabilities among survivors at `wave` with horizons
    /// `past` and `future`.
    pub fn population_table(
        &self,
        wave: WaveLabel,
        past: usize,
        future: usize,
    ) -> Result<FrequencyTable, EstimationError> {
        let t = self.index_of(wave)?;
        if past > t || t + future >= self.waves {
            return Err(EstimationError::HorizonOutOfRange { wave, past, future });
        }
        let mut table = FrequencyTable::zeroed(wave, past, future);
        for path in self.paths() {
            if let Some(sig) = signature(&path.cells, t, past, future) {
                table.add(&sig, path.probability);
            }
        }
        if table.survivors <= 0.0 {
            return Err(EstimationError::EmptySurvivorSet(wave));
        }
        Ok(table)
    }

    /// Samples one unit's raw cells.
    pub fn sample_cells<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<CellStatus> {
        let mut cells = Vec::with_capacity(self.waves);
        let mut y = rng.random::<f64>() < self.initial_prevalence;
        let mut r = draw_response(self.initial_response.get(y), rng);
        cells.push(self.raw_cell(y, r, rng));
        for i in 0..self.waves.saturating_sub(1) {
            if !cells[i].is_alive() || rng.random::<f64>() < self.death(i, y) {
                cells.push(CellStatus::Dead);
                continue;
            }
            if !y {
                y = rng.random::<f64>() < *self.infection_hazard.get(i);
            }
            r = draw_response(self.response_kernel.get(i).get(y).get(r), rng);
            cells.push(self.raw_cell(y, r, rng));
        }
        cells
    }

    fn raw_cell<R: Rng + ?Sized>(&self, y: bool, r: Response, rng: &mut R) -> CellStatus {
        let pick =
            |labels: &[String], rng: &mut R| labels[rng.random_range(0..labels.len())].clone();
        match r {
            Response::Observed => CellStatus::Observed(y),
            Response::Mnar => CellStatus::Missing(pick(&self.mnar_reasons, rng)),
            Response::Mar => CellStatus::Missing(pick(&self.mar_reasons, rng)),
        }
    }
}

fn mar_gap_at(paths: &[Path], i: usize) -> f64 {
    let mass = |f: &dyn Fn(&Path) -> bool| -> f64 {
        paths.iter().filter(|p| f(p)).map(|p| p.probability).sum()
    };
    let alive = mass(&|p| p.outcomes[i].is_some());
    let mar = mass(&|p| p.cells[i] == ClassifiedCell::Mar);
    if alive <= 0.0 || mar <= 0.0 {
        return 0.0;
    }
    let positive = mass(&|p| p.outcomes[i] == Some(true));
    let mar_positive = mass(&|p| p.cells[i] == ClassifiedCell::Mar && p.outcomes[i] == Some(true));
    (mar_positive / mar - positive / alive).abs()
}

/// Draws `n` units i.i.d. from the scenario. Units are named `u1..un`; the
/// reason vocabulary includes every reason the scenario can emit.
pub fn generate(sc: &Scenario, n: usize, seed: u64) -> Result<Panel, PanelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units = (1..=n)
        .map(|k| UnitRecord {
            id: format!("u{k}"),
            strata: Default::default(),
            cells: sc.sample_cells(&mut rng),
        })
        .collect();
    Ok(Panel::new(sc.labels(), units)?
        .with_vocabulary(sc.mnar_reasons.iter().chain(&sc.mar_reasons).cloned()))
}

/// Exact frequency table of the scenario at `wave`.
pub fn population_table(
    sc: &Scenario,
    wave: WaveLabel,
    past: usize,
    future: usize,
) -> Result<FrequencyTable, EstimationError> {
    sc.population_table(wave, past, future)
}

/// Options for [`random_scenario`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomScenarioSpec {
    pub waves: usize,
    /// Make the MAR share independent of the outcome at every wave.
    pub mar_holds: bool,
    pub with_death: bool,
}

fn split_row<R: Rng + ?Sized>(mar: f64, rng: &mut R) -> ResponseProbs {
    let u = rng.random_range(0.05..0.95);
    let rest = 1.0 - mar;
    [rest * u, mar, rest * (1.0 - u)]
}

/// A random scenario with interior probabilities. With `mar_holds` the MAR
/// share at each wave is one constant for every outcome and previous
/// response, which makes MAR missingness independent of the outcome.
pub fn random_scenario<R: Rng + ?Sized>(spec: RandomScenarioSpec, rng: &mut R) -> Scenario {
    let transitions = spec.waves.saturating_sub(1);
    let mar_share = |rng: &mut R| rng.random_range(0.05..0.5);
    let initial_mar = mar_share(rng);
    let initial_response = ByOutcome {
        negative: split_row(initial_mar, rng),
        positive: split_row(
            if spec.mar_holds {
                initial_mar
            } else {
                mar_share(rng)
            },
            rng,
        ),
    };
    let kernels = (0..transitions)
        .map(|_| {
            let c = mar_share(rng);
            let row = |rng: &mut R| {
                let m = if spec.mar_holds { c } else { mar_share(rng) };
                split_row(m, rng)
            };
            let rows = |rng: &mut R| FromPrevious {
                from_mnar: row(rng),
                from_mar: row(rng),
                from_observed: row(rng),
            };
            ByOutcome {
                negative: rows(rng),
                positive: rows(rng),
            }
        })
        .collect();
    let hazards = (0..transitions)
        .map(|_| rng.random_range(0.0..0.3))
        .collect();
    let death_hazard = spec.with_death.then(|| {
        PerWave::Each(
            (0..transitions)
                .map(|_| ByOutcome {
                    negative: rng.random_range(0.0..0.1),
                    positive: rng.random_range(0.0..0.2),
                })
                .collect(),
        )
    });
    Scenario {
        waves: spec.waves,
        wave_labels: None,
        initial_prevalence: rng.random_range(0.05..0.6),
        infection_hazard: PerWave::Each(hazards),
        death_hazard,
        initial_response,
        response_kernel: PerWave::Each(kernels),
        mar_holds: spec.mar_holds,
        mnar_reasons: default_mnar_reasons(),
        mar_reasons: default_mar_reasons(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::classify;

    #[test]
    fn example_one_population_tables() {
        let sc = Scenario::example_one();
        sc.validate().unwrap();
        let t = sc.population_table(0, 0, 1).unwrap();
        assert!((t.positive - 0.3).abs() < 1e-15);
        assert!((t.mar - 0.4).abs() < 1e-15);
        assert!((t.mnar - 0.3).abs() < 1e-15);
        assert!((t.future_mar[0] - 0.25).abs() < 1e-15);
        assert!((t.future_mnar[0] - 0.125).abs() < 1e-15);
        assert!((sc.true_prevalence(0).unwrap() - 0.4).abs() < 1e-15);
        // P(Y=1 | R=0) = 0.1 / 0.4
        assert!((sc.mar_gap(0).unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn paths_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for waves in 1..=4 {
            let sc = random_scenario(
                RandomScenarioSpec {
                    waves,
                    mar_holds: true,
                    with_death: true,
                },
                &mut rng,
            );
            sc.validate().unwrap();
            let total: f64 = sc.paths().iter().map(|p| p.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mar_flag_is_checked() {
        let mut sc = Scenario::example_one();
        sc.mar_holds = true;
        assert!(matches!(
            sc.validate(),
            Err(ScenarioError::MarFlag { wave: 0, .. })
        ));
    }

    #[test]
    fn invalid_rows_rejected() {
        let mut sc = Scenario::example_one();
        sc.initial_response.positive = [0.5, 0.5, 0.5];
        assert!(matches!(sc.validate(), Err(ScenarioError::RowSum { .. })));
        let mut sc = Scenario::example_one();
        sc.infection_hazard = PerWave::Each(vec![0.1, 0.1]);
        assert!(matches!(sc.validate(), Err(ScenarioError::Length { .. })));
    }

    #[test]
    fn generation_is_deterministic_and_monotone() {
        let sc = Scenario::example_one();
        let a = generate(&sc, 200, 5).unwrap();
        assert_eq!(a, generate(&sc, 200, 5).unwrap());
        assert_ne!(a, generate(&sc, 200, 6).unwrap());
        assert!(crate::panel::validate(&a).is_clean());
    }

    #[test]
    fn zero_hazard_freezes_outcomes() {
        let mut sc = Scenario::example_one();
        sc.infection_hazard = PerWave::Constant(0.0);
        sc.waves = 3;
        let paths = sc.paths();
        assert!(paths
            .iter()
            .all(|p| p.outcomes.iter().all(|y| *y == p.outcomes[0])));
        let panel = generate(&sc, 500, 1).unwrap();
        for u in panel.units() {
            let seen: Vec<bool> = u
                .cells
                .iter()
                .filter_map(|c| match c {
                    CellStatus::Observed(y) => Some(*y),
                    _ => None,
                })
                .collect();
            assert!(seen.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn sample_frequencies_match_population() {
        let sc = Scenario::example_one();
        let n = 100_000;
        let panel = generate(&sc, n, 11).unwrap();
        let ip = classify(&panel, &sc.classification()).unwrap();
        let sample = crate::bounds::frequencies(&ip, 0, 0, 1).unwrap();
        let pop = sc.population_table(0, 0, 1).unwrap();
        let pairs = [
            (sample.positive, pop.positive),
            (sample.mar, pop.mar),
            (sample.mnar, pop.mnar),
            (sample.future_mar[0], pop.future_mar[0]),
            (sample.future_mnar[0], pop.future_mnar[0]),
        ];
        for (count, p) in pairs {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((count / n as f64 - p).abs() < 4.0 * se, "{count} vs {p}");
        }
    }

    #[test]
    fn deterministic_all_observed_has_no_missing_mass() {
        let rows = FromPrevious {
            from_mnar: [0.0, 0.0, 1.0],
            from_mar: [0.0, 0.0, 1.0],
            from_observed: [0.0, 0.0, 1.0],
        };
        let sc = Scenario {
            initial_response: ByOutcome::both([0.0, 0.0, 1.0]),
            response_kernel: PerWave::Constant(ByOutcome::both(rows)),
            ..Scenario::example_one()
        };
        let t = sc.population_table(1, 1, 0).unwrap();
        assert_eq!((t.mar, t.mnar), (0.0, 0.0));
        assert_eq!(t.past_mar_total() + t.past_mnar_total(), 0.0);
    }

    #[test]
    fn scenario_json_round_trip() {
        let sc = Scenario::example_one();
        let json = serde_json::to_string(&sc).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(sc, back);
    }
}
