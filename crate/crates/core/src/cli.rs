//! Batch front end: `train`, `forecast`, `evaluate`, `explain`, `stats`.
//!
//! Every command collects its outputs in memory and writes them once at the
//! end. A training run leaves these files in its output directory:
//!
//! | file | contents |
//! |------|----------|
//! | `model.json` | the forest |
//! | `normalization.json` | feature ranges plus the full-data target range |
//! | `summary_stats.csv`, `summary_stats.txt` | descriptive statistics, raw units |
//! | `train.csv`, `test.csv` | the imputed chronological split, raw units |
//!
//! Later commands take the path of `model.json` and expect
//! `normalization.json` next to it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dataset::{
    chronological_split, knn_impute, load_csv, load_query_csv, min_max_normalize, summary_stats_raw,
    Dataset, NormalizationParams, RawTable, SummaryStats,
};
use crate::error::{DataError, Error, KdeError, Result};
use crate::forest::{default_grid, Forest, ForestConfig, ImportanceReport};
use crate::kde::{density_forecast, DEFAULT_GRID_POINTS};
use crate::metrics::EvaluationReport;
use crate::qrf::{conditional_cdf, uniform_taus, PredictionInterval};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QRFSJ_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "qrfsj-out";
const PDP_POINTS: usize = 25;
const PDP_2D_POINTS: usize = 15;

pub const MODEL_FILE: &str = "model.json";
pub const META_FILE: &str = "normalization.json";

/// Settings for a full training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_csv: PathBuf,
    pub train_fraction: f64,
    pub knn_k: usize,
    pub forest: ForestConfig,
    pub confidence_level: f64,
    pub tau_grid_size: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_csv: PathBuf::new(),
            train_fraction: 0.8,
            knn_k: 3,
            forest: ForestConfig::default(),
            confidence_level: 0.9,
            tau_grid_size: 99,
            output_dir: default_output_dir(),
        }
    }
}

/// `$QRFSJ_OUTPUT_DIR`, or `qrfsj-out` when unset.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment. Unknown keys are
    /// errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input_csv" => self.input_csv = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "train_fraction" => self.train_fraction = parse_value(key, value)?,
            "knn_k" => self.knn_k = parse_value(key, value)?,
            "confidence_level" => self.confidence_level = parse_value(key, value)?,
            "tau_grid_size" => self.tau_grid_size = parse_value(key, value)?,
            "ntree" => self.forest.ntree = parse_value(key, value)?,
            "mtry" => {
                self.forest.mtry = match value {
                    "" | "auto" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "min_node_size" => self.forest.min_node_size = parse_value(key, value)?,
            "bootstrap" => self.forest.bootstrap = parse_value(key, value)?,
            "seed" => self.forest.seed = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(DataError::InvalidFraction(self.train_fraction).into());
        }
        if self.knn_k == 0 {
            return Err(DataError::InvalidK.into());
        }
        check_level(self.confidence_level)?;
        check_tau_grid(self.tau_grid_size)?;
        if self.input_csv.as_os_str().is_empty() {
            return Err(Error::Config("input_csv is not set".into()));
        }
        Ok(())
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(crate::error::QrfError::InvalidLevel(level).into());
    }
    Ok(())
}

fn check_tau_grid(size: usize) -> Result<()> {
    if size < 8 {
        return Err(KdeError::TooCoarse {
            what: "quantile levels",
            required: 8,
            found: size,
        }
        .into());
    }
    Ok(())
}

/// Everything besides the forest that later commands need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub normalization: NormalizationParams,
    pub target_name: String,
    /// Target minimum over the full data set (train and test).
    pub target_min: f64,
    pub target_max: f64,
}

impl ModelMeta {
    pub fn target_range(&self) -> f64 {
        self.target_max - self.target_min
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

/// A forest with the preprocessing it was trained under.
#[derive(Debug, Clone)]
pub struct Model {
    pub forest: Forest,
    pub meta: ModelMeta,
}

impl Model {
    /// Load `model.json` and the `normalization.json` beside it.
    pub fn load(model_path: impl AsRef<Path>) -> Result<Self> {
        let model_path = model_path.as_ref();
        let forest = Forest::load(model_path)?;
        let meta = ModelMeta::load(model_path.with_file_name(META_FILE))?;
        if forest.feature_names() != meta.normalization.feature_names().as_slice() {
            return Err(DataError::SchemaMismatch(
                "model and normalization files disagree on feature names".into(),
            )
            .into());
        }
        Ok(Self { forest, meta })
    }

    fn features(&self, table: &RawTable) -> Result<Vec<Vec<f64>>> {
        Ok(self.meta.normalization.normalize_rows(table)?)
    }
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    files
        .iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

fn subset(table: &RawTable, range: std::ops::Range<usize>) -> Result<RawTable> {
    Ok(RawTable::new(
        table.feature_names().to_vec(),
        table.target_name(),
        table.rows()[range].to_vec(),
    )?)
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub n_train: usize,
    pub n_test: usize,
    pub stats: SummaryStats,
    pub files: Vec<PathBuf>,
}

/// Impute, normalise, split and fit; persist the model and its reports.
pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary> {
    config.validate()?;
    let raw = load_csv(&config.input_csv)?;
    let imputed = knn_impute(&raw, config.knn_k)?;
    let (data, normalization) = min_max_normalize(&imputed)?;
    let (train, test) = chronological_split(&data, config.train_fraction)?;
    let forest = Forest::fit(&train, &config.forest)?;
    let stats = summary_stats_raw(&imputed)?;

    let (target_min, target_max) = data
        .target()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let meta = ModelMeta {
        normalization,
        target_name: imputed.target_name().to_string(),
        target_min,
        target_max,
    };
    let n = imputed.len();
    let files = vec![
        (MODEL_FILE.to_string(), forest.to_json()),
        (META_FILE.to_string(), meta.to_json()),
        ("summary_stats.csv".to_string(), stats.to_csv()),
        ("summary_stats.txt".to_string(), stats.to_table()),
        ("train.csv".to_string(), subset(&imputed, 0..train.len())?.to_csv_string()),
        ("test.csv".to_string(), subset(&imputed, train.len()..n)?.to_csv_string()),
    ];
    let files = write_outputs(&config.output_dir, &files)?;
    Ok(TrainSummary {
        n_train: train.len(),
        n_test: test.len(),
        stats,
        files,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRow {
    pub year: i64,
    pub lower: f64,
    pub observed: Option<f64>,
    pub predicted: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityStatus {
    /// A curve was written to the named file.
    Curve {
        file: String,
        bandwidth: f64,
        method: &'static str,
    },
    /// The conditional distribution is a single point; no curve exists.
    PointMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastReport {
    pub level: f64,
    pub rows: Vec<ForecastRow>,
    /// One entry per row when densities were requested.
    pub densities: Vec<(i64, DensityStatus)>,
}

impl ForecastReport {
    /// `year,lower,observed,predicted,upper`, four decimals; missing
    /// observations are empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,lower,observed,predicted,upper\n");
        for r in &self.rows {
            let observed = r.observed.map(|v| format!("{v:.4}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:.4},{},{:.4},{:.4}",
                r.year, r.lower, observed, r.predicted, r.upper
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<6} {:>11} {:>9} {:>9} {:>11}\n",
            "Year", "Lower bound", "Observed", "Predicted", "Upper bound"
        );
        for r in &self.rows {
            let observed = r.observed.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<6} {:>11.4} {:>9} {:>9.4} {:>11.4}",
                r.year, r.lower, observed, r.predicted, r.upper
            );
        }
        out
    }

    /// `year,status,bandwidth,method,file`.
    pub fn density_index(&self) -> String {
        let mut out = String::from("year,status,bandwidth,method,file\n");
        for (year, status) in &self.densities {
            match status {
                DensityStatus::Curve {
                    file,
                    bandwidth,
                    method,
                } => {
                    let _ = writeln!(out, "{year},curve,{bandwidth},{method},{file}");
                }
                DensityStatus::PointMass => {
                    let _ = writeln!(out, "{year},point_mass,,,");
                }
            }
        }
        out
    }

    pub fn intervals(&self) -> Vec<PredictionInterval> {
        self.rows
            .iter()
            .map(|r| PredictionInterval {
                lower: r.lower,
                upper: r.upper,
                nominal_level: self.level,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ForecastOptions {
    pub model: PathBuf,
    pub query_csv: PathBuf,
    pub level: f64,
    pub emit_density: bool,
    pub tau_grid_size: usize,
    pub output_dir: PathBuf,
}

fn forecast_rows(model: &Model, table: &RawTable, level: f64) -> Result<Vec<ForecastRow>> {
    let xs = model.features(table)?;
    table
        .rows()
        .iter()
        .zip(&xs)
        .map(|(row, x)| {
            let cdf = conditional_cdf(&model.forest, x)?;
            let pi = cdf.interval(level)?;
            Ok(ForecastRow {
                year: row.year,
                lower: pi.lower,
                observed: row.target,
                predicted: cdf.quantile(0.5)?,
                upper: pi.upper,
            })
        })
        .collect()
}

/// Median forecasts and central intervals, optionally with one density
/// curve per row written as `density_<year>.csv`.
pub fn cmd_forecast(opts: &ForecastOptions) -> Result<ForecastReport> {
    check_level(opts.level)?;
    if opts.emit_density {
        check_tau_grid(opts.tau_grid_size)?;
    }
    let model = Model::load(&opts.model)?;
    let table = load_query_csv(&opts.query_csv, model.forest.feature_names())?;
    let rows = forecast_rows(&model, &table, opts.level)?;

    let mut files = Vec::new();
    let mut densities = Vec::new();
    if opts.emit_density {
        let taus = uniform_taus(opts.tau_grid_size);
        for (row, x) in table.rows().iter().zip(model.features(&table)?) {
            match density_forecast(&model.forest, &x, &taus, DEFAULT_GRID_POINTS) {
                Ok(curve) => {
                    let file = format!("density_{}.csv", row.year);
                    densities.push((
                        row.year,
                        DensityStatus::Curve {
                            file: file.clone(),
                            bandwidth: curve.bandwidth().value(),
                            method: curve.bandwidth().method().as_str(),
                        },
                    ));
                    files.push((file, curve.to_csv()));
                }
                Err(KdeError::DegenerateSample) => densities.push((row.year, DensityStatus::PointMass)),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let report = ForecastReport {
        level: opts.level,
        rows,
        densities,
    };
    files.push(("forecast.csv".to_string(), report.to_csv()));
    files.push(("forecast.txt".to_string(), report.to_table()));
    if opts.emit_density {
        files.push(("density_index.csv".to_string(), report.density_index()));
    }
    write_outputs(&opts.output_dir, &files)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub model: PathBuf,
    pub test_csv: PathBuf,
    pub level: f64,
    pub output_dir: PathBuf,
}

/// Point and interval metrics on a labelled test file; PINAW is normalised
/// by the full-data target range recorded at training time.
pub fn cmd_evaluate(opts: &EvaluateOptions) -> Result<EvaluationReport> {
    check_level(opts.level)?;
    let model = Model::load(&opts.model)?;
    let table = load_query_csv(&opts.test_csv, model.forest.feature_names())?;
    let observed = table
        .rows()
        .iter()
        .map(|r| {
            r.target.ok_or_else(|| DataError::MissingValue {
                year: r.year,
                column: model.meta.target_name.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = forecast_rows(&model, &table, opts.level)?;
    let predicted: Vec<f64> = rows.iter().map(|r| r.predicted).collect();
    let intervals: Vec<PredictionInterval> = rows
        .iter()
        .map(|r| PredictionInterval {
            lower: r.lower,
            upper: r.upper,
            nominal_level: opts.level,
        })
        .collect();
    let report = EvaluationReport::with_intervals(
        &observed,
        &predicted,
        &intervals,
        model.meta.target_range(),
        opts.level,
    )?;
    write_outputs(
        &opts.output_dir,
        &[
            ("evaluation.txt".to_string(), report.to_table()),
            ("evaluation.kv".to_string(), report.to_kv()),
        ],
    )?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ExplainOptions {
    pub model: PathBuf,
    /// The `train.csv` written by `train`.
    pub data_csv: PathBuf,
    pub top_k: usize,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ExplainReport {
    pub importance: ImportanceReport,
    pub pdp_files: Vec<PathBuf>,
    pub surface_file: Option<PathBuf>,
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Permutation importance plus partial dependence of the `top_k` features
/// and a surface over the top two, with feature values in raw units.
pub fn cmd_explain(opts: &ExplainOptions) -> Result<ExplainReport> {
    let model = Model::load(&opts.model)?;
    let table = load_query_csv(&opts.data_csv, model.forest.feature_names())?;
    let target = table
        .rows()
        .iter()
        .map(|r| {
            r.target.ok_or_else(|| DataError::MissingValue {
                year: r.year,
                column: model.meta.target_name.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let years = table.rows().iter().map(|r| r.year).collect();
    let data = Dataset::new(table.feature_names().to_vec(), years, model.features(&table)?, target)?;
    let importance = model.forest.permutation_importance(&data)?;

    let params = &model.meta.normalization;
    let names = model.forest.feature_names();
    let top = importance.top_k(opts.top_k);
    let mut files = vec![
        ("importance.csv".to_string(), importance.to_csv()),
        ("importance.txt".to_string(), importance.to_table()),
    ];
    let mut pdp_names = Vec::new();
    for &j in &top {
        let curve = model
            .forest
            .partial_dependence(&data, j, &default_grid(&data, j, PDP_POINTS))?;
        let mut csv = String::from("value,prediction\n");
        for (g, p) in curve {
            let _ = writeln!(csv, "{},{}", params.denormalize_value(j, g), p);
        }
        let name = format!("pdp_{}.csv", file_stem(&names[j]));
        pdp_names.push(name.clone());
        files.push((name, csv));
    }
    let mut surface_name = None;
    if let [a, b, ..] = top[..] {
        let grid_a = default_grid(&data, a, PDP_2D_POINTS);
        let grid_b = default_grid(&data, b, PDP_2D_POINTS);
        let surface = model.forest.partial_dependence_2d(&data, a, b, &grid_a, &grid_b)?;
        let mut csv = format!("{},{},prediction\n", names[a], names[b]);
        for (ga, row) in grid_a.iter().zip(&surface) {
            for (gb, p) in grid_b.iter().zip(row) {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    params.denormalize_value(a, *ga),
                    params.denormalize_value(b, *gb),
                    p
                );
            }
        }
        let name = format!("pdp2d_{}_{}.csv", file_stem(&names[a]), file_stem(&names[b]));
        surface_name = Some(name.clone());
        files.push((name, csv));
    }
    write_outputs(&opts.output_dir, &files)?;
    let dir = &opts.output_dir;
    Ok(ExplainReport {
        importance,
        pdp_files: pdp_names.iter().map(|n| dir.join(n)).collect(),
        surface_file: surface_name.map(|n| dir.join(n)),
    })
}

/// Summary statistics of a yield table in raw units, imputing missing
/// cells first when there are any.
pub fn cmd_stats(input_csv: impl AsRef<Path>, knn_k: usize) -> Result<SummaryStats> {
    let raw = load_csv(input_csv)?;
    let table = if raw.is_complete() { raw } else { knn_impute(&raw, knn_k)? };
    Ok(summary_stats_raw(&table)?)
}

#[derive(Debug, Parser)]
#[command(name = "qrfsj", version, about = "Quantile regression forest density forecasts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Impute, normalise, split and fit a forest.
    Train(TrainArgs),
    /// Median forecasts, intervals and density curves for query rows.
    Forecast(ForecastArgs),
    /// Accuracy and interval metrics on a labelled test file.
    Evaluate(EvaluateArgs),
    /// Permutation importance and partial dependence.
    Explain(ExplainArgs),
    /// Summary statistics of a CSV file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// key=value configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub knn_k: Option<usize>,
    #[arg(long)]
    pub ntree: Option<usize>,
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(long)]
    pub min_node_size: Option<usize>,
    #[arg(long)]
    pub bootstrap: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl TrainArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            c.input_csv = v.clone();
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        if let Some(v) = self.train_fraction {
            c.train_fraction = v;
        }
        if let Some(v) = self.knn_k {
            c.knn_k = v;
        }
        if let Some(v) = self.ntree {
            c.forest.ntree = v;
        }
        if let Some(v) = self.mtry {
            c.forest.mtry = Some(v);
        }
        if let Some(v) = self.min_node_size {
            c.forest.min_node_size = v;
        }
        if let Some(v) = self.bootstrap {
            c.forest.bootstrap = v;
        }
        if let Some(v) = self.seed {
            c.forest.seed = v;
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Path to model.json.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    /// Also write density_<year>.csv for every row.
    #[arg(long)]
    pub density: bool,
    #[arg(long, default_value_t = 99)]
    pub tau_grid_size: usize,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Training rows (train.csv from the train command).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub top_k: usize,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub knn_k: usize,
    /// Print CSV instead of a table.
    #[arg(long)]
    pub csv: bool,
}

/// Run one parsed command, returning what it would print on success.
pub fn run(cli: Cli) -> Result<String> {
    let out_dir = |d: Option<PathBuf>| d.unwrap_or_else(default_output_dir);
    match cli.command {
        Command::Train(args) => {
            let config = args.to_config()?;
            let s = cmd_train(&config)?;
            Ok(format!(
                "trained on {} rows, holding out {}\n{}",
                s.n_train,
                s.n_test,
                s.stats.to_table()
            ))
        }
        Command::Forecast(args) => {
            let report = cmd_forecast(&ForecastOptions {
                model: args.model,
                query_csv: args.query,
                level: args.level,
                emit_density: args.density,
                tau_grid_size: args.tau_grid_size,
                output_dir: out_dir(args.output_dir),
            })?;
            Ok(report.to_table())
        }
        Command::Evaluate(args) => {
            let report = cmd_evaluate(&EvaluateOptions {
                model: args.model,
                test_csv: args.test,
                level: args.level,
                output_dir: out_dir(args.output_dir),
            })?;
            Ok(report.to_table())
        }
        Command::Explain(args) => {
            let report = cmd_explain(&ExplainOptions {
                model: args.model,
                data_csv: args.data,
                top_k: args.top_k,
                output_dir: out_dir(args.output_dir),
            })?;
            Ok(report.importance.to_table())
        }
        Command::Stats(args) => {
            let stats = cmd_stats(&args.input, args.knn_k)?;
            Ok(if args.csv { stats.to_csv() } else { stats.to_table() })
        }
    }
}

/// One-line diagnostic: `error[<Tag>]: <message>`.
pub fn error_line(err: &Error) -> String {
    let msg = err.to_string().replace('\n', " ");
    format!("error[{}]: {}", err.tag(), msg)
}
