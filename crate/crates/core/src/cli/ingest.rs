//! Wide and long CSV panel formats.
//!
//! Wide: `unit_id, <covariates...>` followed by one
//! `status_<wave>, outcome_<wave>, reason_<wave>` triple per wave.
//! Long: `unit_id, <covariates...>, wave, status, outcome, reason` with one
//! row per unit and wave.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use thiserror::Error;

use crate::error::PanelError;
use crate::panel::{CellStatus, Panel, UnitRecord, WaveLabel};

/// One problem with one input row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("{} malformed row(s):\n{}", .0.len(), join_rows(.0))]
    Rows(Vec<RowError>),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(|r| format!("  {r}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses one `(status, outcome, reason)` triple.
pub fn parse_cell(status: &str, outcome: &str, reason: &str) -> Result<CellStatus, String> {
    let (status, outcome, reason) = (status.trim(), outcome.trim(), reason.trim());
    match status {
        "dead" => {
            if !outcome.is_empty() || !reason.is_empty() {
                return Err("status=dead must have empty outcome and reason".into());
            }
            Ok(CellStatus::Dead)
        }
        "alive" => match (outcome, reason) {
            ("0", "") => Ok(CellStatus::Observed(false)),
            ("1", "") => Ok(CellStatus::Observed(true)),
            ("", "") => Err("status=alive needs an outcome or a missingness reason".into()),
            ("", r) => Ok(CellStatus::Missing(r.to_string())),
            ("0" | "1", _) => Err("an observed outcome cannot carry a missingness reason".into()),
            (o, _) => Err(format!("outcome must be 0, 1 or empty, got `{o}`")),
        },
        other => Err(format!("status must be `alive` or `dead`, got `{other}`")),
    }
}

fn encode_cell(cell: &CellStatus) -> [&str; 3] {
    match cell {
        CellStatus::Dead => ["dead", "", ""],
        CellStatus::Observed(true) => ["alive", "1", ""],
        CellStatus::Observed(false) => ["alive", "0", ""],
        CellStatus::Missing(r) => ["alive", "", r.as_str()],
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

struct WideLayout {
    covariates: Vec<String>,
    waves: Vec<WaveLabel>,
}

fn wide_layout(headers: &csv::StringRecord) -> Result<WideLayout, IngestError> {
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if names.first() != Some(&"unit_id") {
        return Err(IngestError::Header("first column must be `unit_id`".into()));
    }
    let first_wave = names
        .iter()
        .position(|n| n.starts_with("status_"))
        .ok_or_else(|| IngestError::Header("no `status_<wave>` columns".into()))?;
    let covariates: Vec<String> = names[1..first_wave].iter().map(|s| s.to_string()).collect();
    let rest = &names[first_wave..];
    if !rest.len().is_multiple_of(3) {
        return Err(IngestError::Header(
            "wave columns must come in status/outcome/reason triples".into(),
        ));
    }
    let mut waves = Vec::with_capacity(rest.len() / 3);
    for triple in rest.chunks(3) {
        let label = triple[0].strip_prefix("status_").ok_or_else(|| {
            IngestError::Header(format!(
                "expected a `status_<wave>` column, found `{}`",
                triple[0]
            ))
        })?;
        if triple[1] != format!("outcome_{label}") || triple[2] != format!("reason_{label}") {
            return Err(IngestError::Header(format!(
                "expected `outcome_{label}, reason_{label}` after `status_{label}`"
            )));
        }
        let wave: WaveLabel = label
            .parse()
            .map_err(|_| IngestError::Header(format!("wave label `{label}` is not an integer")))?;
        waves.push(wave);
    }
    Ok(WideLayout { covariates, waves })
}

/// Reads a wide-format panel. Every malformed row is reported, not just
/// the first.
pub fn read_wide<R: Read>(input: R) -> Result<Panel, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let layout = wide_layout(reader.headers()?)?;
    let width = 1 + layout.covariates.len() + 3 * layout.waves.len();
    let mut units = Vec::new();
    let mut errors = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = line_of(&record);
        if record.len() != width {
            errors.push(RowError {
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
            continue;
        }
        let id = record[0].to_string();
        if id.is_empty() {
            errors.push(RowError {
                line,
                message: "empty unit_id".into(),
            });
            continue;
        }
        let strata = layout
            .covariates
            .iter()
            .enumerate()
            .map(|(k, name)| (name.clone(), record[1 + k].to_string()))
            .collect();
        let base = 1 + layout.covariates.len();
        let mut cells = Vec::with_capacity(layout.waves.len());
        let mut bad = false;
        for (k, wave) in layout.waves.iter().enumerate() {
            let i = base + 3 * k;
            match parse_cell(&record[i], &record[i + 1], &record[i + 2]) {
                Ok(c) => cells.push(c),
                Err(message) => {
                    errors.push(RowError {
                        line,
                        message: format!("unit `{id}`, wave {wave}: {message}"),
                    });
                    bad = true;
                }
            }
        }
        if !bad {
            units.push(UnitRecord { id, strata, cells });
        }
    }
    if !errors.is_empty() {
        return Err(IngestError::Rows(errors));
    }
    Ok(Panel::new(layout.waves, units)?)
}

/// Writes a panel in wide format. Covariates appear in name order.
pub fn write_wide<W: Write>(panel: &Panel, output: W) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(output);
    let covariates = panel.covariate_names();
    let mut header = vec!["unit_id".to_string()];
    header.extend(covariates.iter().cloned());
    for w in panel.waves() {
        header.extend([
            format!("status_{w}"),
            format!("outcome_{w}"),
            format!("reason_{w}"),
        ]);
    }
    writer.write_record(&header)?;
    for unit in panel.units() {
        let mut row: Vec<&str> = vec![&unit.id];
        row.extend(covariates.iter().map(|c| unit.strata[c].as_str()));
        for cell in &unit.cells {
            row.extend(encode_cell(cell));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a long-format panel. Each unit needs exactly one row per wave and
/// constant covariates.
pub fn read_long<R: Read>(input: R) -> Result<Panel, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    let n = headers.len();
    if n < 5
        || headers[0] != "unit_id"
        || headers[n - 4..] != ["wave", "status", "outcome", "reason"]
    {
        return Err(IngestError::Header(
            "long format needs `unit_id, <covariates...>, wave, status, outcome, reason`".into(),
        ));
    }
    let covariates = &headers[1..n - 4];
    type Entry = (
        u64,
        BTreeMap<String, String>,
        BTreeMap<WaveLabel, CellStatus>,
    );
    let mut order: Vec<String> = Vec::new();
    let mut by_unit: BTreeMap<String, Entry> = BTreeMap::new();
    let mut waves = std::collections::BTreeSet::new();
    let mut errors = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = line_of(&record);
        let err = |message: String| RowError { line, message };
        if record.len() != n {
            errors.push(err(format!("expected {n} fields, found {}", record.len())));
            continue;
        }
        let id = record[0].to_string();
        let wave: WaveLabel = match record[n - 4].parse() {
            Ok(w) => w,
            Err(_) => {
                errors.push(err(format!("wave `{}` is not an integer", &record[n - 4])));
                continue;
            }
        };
        let cell = match parse_cell(&record[n - 3], &record[n - 2], &record[n - 1]) {
            Ok(c) => c,
            Err(m) => {
                errors.push(err(format!("unit `{id}`, wave {wave}: {m}")));
                continue;
            }
        };
        let strata: BTreeMap<String, String> = covariates
            .iter()
            .enumerate()
            .map(|(k, c)| (c.clone(), record[1 + k].to_string()))
            .collect();
        waves.insert(wave);
        let entry = by_unit.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            (line, strata.clone(), BTreeMap::new())
        });
        if entry.1 != strata {
            errors.push(err(format!("unit `{id}` changes covariate values")));
        }
        if entry.2.insert(wave, cell).is_some() {
            errors.push(err(format!("unit `{id}` has two rows for wave {wave}")));
        }
    }
    let waves: Vec<WaveLabel> = waves.into_iter().collect();
    let mut units = Vec::with_capacity(order.len());
    for id in order {
        let (line, strata, cells) = by_unit.remove(&id).expect("recorded unit");
        if cells.len() != waves.len() {
            errors.push(RowError {
                line,
                message: format!("unit `{id}` lacks rows for some waves"),
            });
            continue;
        }
        units.push(UnitRecord {
            id,
            strata,
            cells: cells.into_values().collect(),
        });
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(IngestError::Rows(errors));
    }
    Ok(Panel::new(waves, units)?)
}

/// Writes a panel in long format.
pub fn write_long<W: Write>(panel: &Panel, output: W) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(output);
    let covariates = panel.covariate_names();
    let mut header = vec!["unit_id".to_string()];
    header.extend(covariates.iter().cloned());
    header.extend(["wave", "status", "outcome", "reason"].map(String::from));
    writer.write_record(&header)?;
    for unit in panel.units() {
        for (wave, cell) in panel.waves().iter().zip(&unit.cells) {
            let wave = wave.to_string();
            let mut row: Vec<&str> = vec![&unit.id];
            row.extend(covariates.iter().map(|c| unit.strata[c].as_str()));
            row.push(&wave);
            row.extend(encode_cell(cell));
            writer.write_record(&row)?;
        }
    }
    writer.flush()?;
    Ok(())
}
