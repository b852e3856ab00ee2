//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 usage error,
//! 3 ingestion, 4 validation, 5 configuration, 6 estimation or inference,
//! 7 a testable condition failed under `--strict-checks`.

pub mod analysis;
pub mod config;
pub mod ingest;
pub mod report;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{longitudinal_bounds, EstimatorRegistry};
use crate::diagnostics::check_all;
use crate::error::{ConfigError, EstimationError, InferenceError, PanelError, ScenarioError};
use crate::panel::{Classification, Panel, WaveLabel};
use crate::simlab::{
    coverage_study, generate, oracle_range, CoverageError, CoverageSpec, OracleOutcome, Scenario,
};
use analysis::{BoundsRow, CHECK_FAILED};
use config::RunConfig;
use ingest::IngestError;
use report::ReportHeader;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("ingestion failed: {0}")]
    Ingest(#[from] IngestError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("scenario error: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("estimation failed: {0}")]
    Estimation(#[from] EstimationError),
    #[error("inference failed: {0}")]
    Inference(String),
    #[error("testable conditions failed under --strict-checks: {0}")]
    Checks(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Ingest(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Config(_) | CliError::Scenario(_) => 5,
            CliError::Estimation(_) | CliError::Inference(_) => 6,
            CliError::Checks(_) => 7,
        }
    }

    pub(crate) fn covariate(e: PanelError) -> Self {
        CliError::Config(ConfigError::Invalid(e.to_string()))
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        CliError::Inference(e.to_string())
    }
}

impl From<CoverageError> for CliError {
    fn from(e: CoverageError) -> Self {
        match e {
            CoverageError::Scenario(e) => e.into(),
            CoverageError::Estimation(e) => e.into(),
            CoverageError::Panel(e) => CliError::Validation(e.to_string()),
            CoverageError::Shares => CliError::Config(ConfigError::Invalid(e.to_string())),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "typebounds",
    version,
    about = "Bounds and confidence intervals for a monotone binary prevalence under type-specific nonresponse"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PanelFormat {
    Wide,
    Long,
}

/// Input panel and unit filters.
#[derive(Debug, Clone, Args)]
pub struct InputOpts {
    /// Panel CSV file.
    pub input: PathBuf,
    /// Layout of the input file.
    #[arg(long, value_enum, default_value = "wide")]
    pub input_format: PanelFormat,
    /// File with unit ids to exclude, one per line.
    #[arg(long)]
    pub exclude_ids: Option<PathBuf>,
    /// Drop units without any observed outcome.
    #[arg(long)]
    pub exclude_never_observed: bool,
    /// Drop units that break absorbing death or monotone outcomes instead of failing.
    #[arg(long)]
    pub drop_nonmonotone: bool,
}

/// Analysis settings; each flag overrides the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct AnalysisOpts {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Target wave(s).
    #[arg(long = "wave", value_delimiter = ',')]
    pub waves: Vec<WaveLabel>,
    /// Past horizon I (clipped to the available waves).
    #[arg(long)]
    pub past: Option<usize>,
    /// Future horizon J (clipped to the available waves).
    #[arg(long)]
    pub future: Option<usize>,
    /// Covariates reported as separate subgroups.
    #[arg(long, value_delimiter = ',')]
    pub by: Vec<String>,
    /// Covariates whose strata are estimated separately and pooled.
    #[arg(long, value_delimiter = ',')]
    pub pool_over: Vec<String>,
    /// Missingness reasons treated as MAR.
    #[arg(long = "mar", value_delimiter = ',')]
    pub mar: Vec<String>,
    /// Ordered reasons moved from MNAR to MAR by the sensitivity ladder.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<String>,
    /// Bound estimator (worst-case, sharpened, longitudinal).
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap replicates.
    #[arg(long)]
    pub boot: Option<usize>,
    /// Intersect intervals with [0, 1].
    #[arg(long)]
    pub clamp01: bool,
    /// Abort when a testable condition fails.
    #[arg(long)]
    pub strict_checks: bool,
    /// Slack below which a condition counts as violated.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Where and how to write the report.
#[derive(Debug, Clone, Args)]
pub struct OutputOpts {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PanelCommand {
    #[command(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    pub analysis: AnalysisOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the panel and print per-wave missingness.
    Validate {
        #[command(flatten)]
        input: InputOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Point estimates of the bounds.
    Bounds(PanelCommand),
    /// Bounds with bootstrap confidence intervals.
    Ci(PanelCommand),
    /// Testable conditions with advisory bootstrap p-values.
    Check(PanelCommand),
    /// Bounds and intervals along the MNAR-to-MAR ladder.
    Sensitivity(PanelCommand),
    /// Draw a panel from a scenario, or run a coverage study.
    Simulate(SimulateArgs),
    /// Compare the closed-form bounds with the brute-force oracle on a scenario.
    Oracle(OracleArgs),
    /// Convert a panel between wide and long layouts.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value = "long")]
        from: PanelFormat,
        #[arg(long, value_enum, default_value = "wide")]
        to: PanelFormat,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Units per panel.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Run a coverage study with this many replicates instead of writing a panel.
    #[arg(long)]
    pub coverage_reps: Option<usize>,
    #[arg(long)]
    pub wave: Option<WaveLabel>,
    #[arg(long, default_value_t = 0)]
    pub past: usize,
    #[arg(long, default_value_t = 0)]
    pub future: usize,
    #[arg(long, default_value_t = 1000)]
    pub boot: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = "longitudinal")]
    pub method: String,
    /// Layout of the written panel.
    #[arg(long, value_enum, default_value = "wide")]
    pub panel_format: PanelFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub wave: WaveLabel,
    #[arg(long, default_value_t = 0)]
    pub past: usize,
    #[arg(long, default_value_t = 0)]
    pub future: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

/// Merges the configuration file with flag overrides; flags win.
pub fn resolve_config(
    opts: &AnalysisOpts,
    input: Option<&InputOpts>,
) -> Result<RunConfig, CliError> {
    let mut cfg = match &opts.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if !opts.waves.is_empty() {
        cfg.target_waves = opts.waves.clone();
    }
    if let Some(v) = opts.past {
        cfg.past = v;
    }
    if let Some(v) = opts.future {
        cfg.future = v;
    }
    if !opts.by.is_empty() {
        cfg.by = opts.by.clone();
    }
    if !opts.pool_over.is_empty() {
        cfg.pool_over = opts.pool_over.clone();
    }
    if !opts.mar.is_empty() {
        cfg.mar_reasons = opts.mar.clone();
    }
    if !opts.ladder.is_empty() {
        cfg.ladder = opts.ladder.clone();
    }
    if let Some(m) = &opts.method {
        cfg.method = m.clone();
    }
    if let Some(a) = opts.alpha {
        cfg.alpha = a;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(b) = opts.boot {
        cfg.boot = b;
    }
    if let Some(t) = opts.tolerance {
        cfg.tolerance = t;
    }
    cfg.clamp01 |= opts.clamp01;
    cfg.strict_checks |= opts.strict_checks;
    if let Some(input) = input {
        cfg.drop_nonmonotone |= input.drop_nonmonotone;
        cfg.exclude_never_observed |= input.exclude_never_observed;
    }
    cfg.check()?;
    Ok(cfg)
}

pub fn read_panel(path: &Path, format: PanelFormat) -> Result<Panel, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    Ok(match format {
        PanelFormat::Wide => ingest::read_wide(file)?,
        PanelFormat::Long => ingest::read_long(file)?,
    })
}

fn write_panel(panel: &Panel, format: PanelFormat, out: impl Write) -> Result<(), CliError> {
    match format {
        PanelFormat::Wide => ingest::write_wide(panel, out)?,
        PanelFormat::Long => ingest::write_long(panel, out)?,
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_ids(path: Option<&Path>) -> Result<BTreeSet<String>, CliError> {
    let Some(path) = path else {
        return Ok(BTreeSet::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

#[derive(Serialize)]
struct WaveRow {
    wave: WaveLabel,
    units: usize,
    observed: usize,
    missing: usize,
    dead: usize,
    missing_proportion: f64,
}

fn run_validate(input: &InputOpts, output: &OutputOpts) -> Result<(), CliError> {
    let panel = read_panel(&input.input, input.input_format)?;
    let summary: Vec<WaveRow> = panel
        .wave_summary()
        .into_iter()
        .map(|s| WaveRow {
            wave: s.wave,
            units: s.units,
            observed: s.observed,
            missing: s.missing,
            dead: s.dead,
            missing_proportion: s.missing_proportion(),
        })
        .collect();
    let report = crate::panel::validate(&panel);
    let header = ReportHeader::new("validate")
        .note("units", panel.units().len())
        .note("violations", report.violations.len());
    let mut out = open_output(output.out.as_deref())?;
    match output.format {
        OutputFormat::Json => report::write_json(&mut out, &header, &summary)?,
        OutputFormat::Csv => {
            writeln!(out, "{}", header.comment_line())?;
            let mut w = csv::Writer::from_writer(&mut out);
            for row in &summary {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    if report.is_clean() {
        Ok(())
    } else {
        let lines: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("  unit `{}`: {:?}", v.unit_id, v.kind))
            .collect();
        Err(CliError::Validation(format!(
            "{} violation(s):\n{}",
            lines.len(),
            lines.join("\n")
        )))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PanelTask {
    Bounds,
    Ci,
    Check,
    Sensitivity,
}

impl PanelTask {
    fn name(self) -> &'static str {
        match self {
            PanelTask::Bounds => "bounds",
            PanelTask::Ci => "ci",
            PanelTask::Check => "check",
            PanelTask::Sensitivity => "sensitivity",
        }
    }
}

fn failed_checks(rows: &[BoundsRow]) -> Vec<String> {
    rows.iter()
        .filter_map(|r| {
            r.flags
                .iter()
                .find_map(|f| f.strip_prefix(CHECK_FAILED))
                .map(|ids| {
                    let rung = r
                        .rung
                        .as_deref()
                        .map(|k| format!(" rung {k}"))
                        .unwrap_or_default();
                    format!("{} wave {}{rung}: {ids}", r.stratum, r.wave)
                })
        })
        .collect()
}

fn run_panel_task(task: PanelTask, cmd: &PanelCommand) -> Result<(), CliError> {
    let cfg = resolve_config(&cmd.analysis, Some(&cmd.input))?;
    let panel = read_panel(&cmd.input.input, cmd.input.input_format)?;
    cfg.check_against(&panel)?;
    let exclude = read_ids(cmd.input.exclude_ids.as_deref())?;
    let prepared = analysis::prepare(panel, &cfg, &exclude)?;
    let panel = &prepared.panel;
    let registry = EstimatorRegistry::builtin();
    let est = analysis::estimator(&cfg, &registry)?;
    let cls = Classification::new(cfg.mar_reasons.iter().cloned());

    let mut header = ReportHeader::new(task.name())
        .note("method", &cfg.method)
        .note("units", panel.units().len());
    for (key, n) in [
        ("dropped_invalid", prepared.dropped_invalid),
        ("dropped_unobserved", prepared.dropped_unobserved),
        ("dropped_listed", prepared.dropped_listed),
    ] {
        if n > 0 {
            header = header.note(key, n);
        }
    }
    let mut out_buf = Vec::new();
    match task {
        PanelTask::Check => {
            let rows = analysis::check_rows(panel, &cls, &cfg)?;
            if cfg.boot >= 2 {
                header = header.randomized(cfg.seed, cfg.boot, None);
            }
            match cmd.output.format {
                OutputFormat::Csv => report::write_checks_csv(&mut out_buf, &header, &rows)?,
                OutputFormat::Json => report::write_json(&mut out_buf, &header, &rows)?,
            }
            let failed: Vec<String> = rows
                .iter()
                .filter(|r| !r.satisfied)
                .map(|r| format!("{} wave {}: {}", r.stratum, r.wave, r.condition))
                .collect();
            emit(cmd.output.out.as_deref(), &out_buf)?;
            if cfg.strict_checks && !failed.is_empty() {
                return Err(CliError::Checks(failed.join(", ")));
            }
            return Ok(());
        }
        PanelTask::Bounds | PanelTask::Ci | PanelTask::Sensitivity => {
            // A sensitivity run with `--boot 0` reports bounds only.
            let with_ci = match task {
                PanelTask::Ci => true,
                PanelTask::Sensitivity => cfg.boot > 0,
                _ => false,
            };
            if with_ci {
                header = header.randomized(cfg.seed, cfg.boot, Some(cfg.alpha));
            }
            let rows = if task == PanelTask::Sensitivity {
                analysis::sensitivity_rows(panel, &cfg, &est, with_ci)?
            } else {
                analysis::bounds_rows(panel, &cls, &cfg, &est, with_ci)?
            };
            let failed = failed_checks(&rows);
            if !failed.is_empty() {
                for f in &failed {
                    eprintln!("warning: testable condition violated: {f}");
                }
                if cfg.strict_checks {
                    return Err(CliError::Checks(failed.join("; ")));
                }
            }
            match cmd.output.format {
                OutputFormat::Csv => report::write_bounds_csv(
                    &mut out_buf,
                    &header,
                    &rows,
                    task == PanelTask::Sensitivity,
                )?,
                OutputFormat::Json => report::write_json(&mut out_buf, &header, &rows)?,
            }
        }
    }
    emit(cmd.output.out.as_deref(), &out_buf)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let sc: Scenario = serde_json::from_str(&text)
        .map_err(|e| ScenarioError::Invalid(format!("{}: {e}", path.display())))?;
    sc.validate()?;
    Ok(sc)
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let sc = read_scenario(&args.scenario)?;
    let Some(reps) = args.coverage_reps else {
        let panel =
            generate(&sc, args.n, args.seed).map_err(|e| CliError::Validation(e.to_string()))?;
        let mut out = open_output(args.out.as_deref())?;
        write_panel(&panel, args.panel_format, &mut out)?;
        out.flush()?;
        return Ok(());
    };
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(ConfigError::InvalidAlpha(args.alpha).into());
    }
    let registry = EstimatorRegistry::builtin();
    let estimator = registry
        .get(&args.method)
        .ok_or_else(|| ConfigError::UnknownEstimator(args.method.clone()))?;
    let target_wave = args.wave.unwrap_or_else(|| sc.labels()[0]);
    let spec = CoverageSpec {
        estimator,
        target_wave,
        past: args.past,
        future: args.future,
        n: args.n,
        reps,
        boot: args.boot,
        alpha: args.alpha,
        seed: args.seed,
    };
    let report = coverage_study(&sc, &spec)?;
    let header = ReportHeader::new("simulate")
        .randomized(args.seed, args.boot, Some(args.alpha))
        .note("n", args.n)
        .note("wave", target_wave)
        .note("I", args.past)
        .note("J", args.future);
    let mut out = open_output(args.out.as_deref())?;
    writeln!(out, "{}", header.comment_line())?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.serialize(&report)?;
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OracleRow {
    wave: WaveLabel,
    #[serde(rename = "I")]
    past: usize,
    #[serde(rename = "J")]
    future: usize,
    feasible: bool,
    oracle_min: Option<f64>,
    oracle_max: Option<f64>,
    lower: f64,
    upper: f64,
    selected_lower: String,
    selected_upper: String,
    violated_checks: String,
}

fn run_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let sc = read_scenario(&args.scenario)?;
    let ft = sc.population_table(args.wave, args.past, args.future)?;
    let outcome = oracle_range(&ft, args.grid_step)?;
    let bounds = longitudinal_bounds(&ft);
    let violated: Vec<String> = check_all(&ft, 1e-12)
        .into_iter()
        .filter(|r| r.violated())
        .map(|r| r.id.to_string())
        .collect();
    let range = outcome.range();
    let row = OracleRow {
        wave: args.wave,
        past: args.past,
        future: args.future,
        feasible: matches!(outcome, OracleOutcome::Feasible(_)),
        oracle_min: range.map(|r| r.min_pi),
        oracle_max: range.map(|r| r.max_pi),
        lower: bounds.lower,
        upper: bounds.upper,
        selected_lower: bounds
            .selected_lower()
            .map_or("none".into(), |c| c.label.clone()),
        selected_upper: bounds
            .selected_upper()
            .map_or("none".into(), |c| c.label.clone()),
        violated_checks: violated.join("+"),
    };
    let header = ReportHeader::new("oracle").note("grid_step", args.grid_step);
    let mut out = open_output(None)?;
    match args.format {
        OutputFormat::Json => report::write_json(&mut out, &header, std::slice::from_ref(&row))?,
        OutputFormat::Csv => {
            writeln!(out, "{}", header.comment_line())?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.serialize(&row)?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate { input, output } => run_validate(input, output),
        Command::Bounds(c) => run_panel_task(PanelTask::Bounds, c),
        Command::Ci(c) => run_panel_task(PanelTask::Ci, c),
        Command::Check(c) => run_panel_task(PanelTask::Check, c),
        Command::Sensitivity(c) => run_panel_task(PanelTask::Sensitivity, c),
        Command::Simulate(a) => run_simulate(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Convert {
            input,
            output,
            from,
            to,
        } => {
            let panel = read_panel(input, *from)?;
            let file = BufWriter::new(File::create(output)?);
            write_panel(&panel, *to, file)
        }
    }
}

/// Parses process arguments, runs the command and maps errors to exit codes.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
