//! CSV and JSON report writers.
//!
//! Every CSV report starts with one `#` line naming the tool version and, for
//! randomized output, the seed and bootstrap size.

use std::io::Write;

use serde::Serialize;

use super::analysis::{BoundsRow, CheckRow};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const BOUNDS_COLUMNS: [&str; 12] = [
    "stratum",
    "wave",
    "I",
    "J",
    "lower",
    "upper",
    "selected_lower",
    "selected_upper",
    "c_value",
    "ci_lower",
    "ci_upper",
    "flags",
];

pub const CHECK_COLUMNS: [&str; 11] = [
    "stratum",
    "wave",
    "I",
    "J",
    "condition",
    "lhs",
    "rhs",
    "slack",
    "satisfied",
    "vacuous",
    "p_value",
];

/// Provenance written at the top of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Further `key=value` notes such as dropped-unit counts.
    pub notes: Vec<(String, String)>,
}

impl ReportHeader {
    pub fn new(command: &str) -> Self {
        Self {
            tool: "typebounds",
            version: VERSION,
            command: command.to_string(),
            seed: None,
            boot: None,
            alpha: None,
            notes: Vec::new(),
        }
    }

    pub fn randomized(mut self, seed: u64, boot: usize, alpha: Option<f64>) -> Self {
        self.seed = Some(seed);
        self.boot = Some(boot);
        self.alpha = alpha;
        self
    }

    pub fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn comment_line(&self) -> String {
        let mut parts = vec![
            format!("# {} {}", self.tool, self.version),
            format!("command={}", self.command),
        ];
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        if let Some(b) = self.boot {
            parts.push(format!("boot={b}"));
        }
        if let Some(a) = self.alpha {
            parts.push(format!("alpha={a}"));
        }
        parts.extend(self.notes.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_bounds_csv<W: Write>(
    mut out: W,
    header: &ReportHeader,
    rows: &[BoundsRow],
    with_rung: bool,
) -> Result<(), csv::Error> {
    writeln!(out, "{}", header.comment_line())?;
    let mut writer = csv::Writer::from_writer(out);
    let mut columns: Vec<&str> = BOUNDS_COLUMNS.to_vec();
    if with_rung {
        columns.push("rung");
    }
    writer.write_record(&columns)?;
    for r in rows {
        let mut record = vec![
            r.stratum.clone(),
            r.wave.to_string(),
            r.past.to_string(),
            r.future.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            r.selected_lower.clone(),
            r.selected_upper.clone(),
            opt(r.c_value),
            opt(r.ci_lower),
            opt(r.ci_upper),
            r.flags.join(";"),
        ];
        if with_rung {
            record.push(r.rung.clone().unwrap_or_default());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_checks_csv<W: Write>(
    mut out: W,
    header: &ReportHeader,
    rows: &[CheckRow],
) -> Result<(), csv::Error> {
    writeln!(out, "{}", header.comment_line())?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CHECK_COLUMNS)?;
    for r in rows {
        writer.write_record([
            r.stratum.clone(),
            r.wave.to_string(),
            r.past.to_string(),
            r.future.to_string(),
            r.condition.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.satisfied.to_string(),
            r.vacuous.to_string(),
            opt(r.p_value),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonReport<'a, T: Serialize> {
    header: &'a ReportHeader,
    rows: &'a [T],
}

/// JSON report with the same header fields and one object per row.
pub fn write_json<W: Write, T: Serialize>(
    mut out: W,
    header: &ReportHeader,
    rows: &[T],
) -> Result<(), serde_json::Error> {
    serde_json::to_writer_pretty(&mut out, &JsonReport { header, rows })?;
    writeln!(out).map_err(serde_json::Error::io)
}
