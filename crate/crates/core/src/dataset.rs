//! Tabular yield data: CSV loading, KNN imputation, min-max scaling,
//! chronological splitting and summary statistics.
//!
//! Rows are seasons (one per year); columns are weather features followed
//! by the yield target in t/ha. Only the features are rescaled; the target
//! always stays in its original units.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Error, Result};
use crate::numeric::mean;

/// One season of raw observations. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub year: i64,
    pub features: Vec<Option<f64>>,
    pub target: Option<f64>,
}

/// Raw table as read from disk, before imputation.
///
/// Rows are kept sorted by strictly increasing year and every row has one
/// slot per feature name.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    feature_names: Vec<String>,
    target_name: String,
    rows: Vec<RawRow>,
}

impl RawTable {
    /// Build a table, sorting rows by year.
    pub fn new(
        feature_names: Vec<String>,
        target_name: impl Into<String>,
        mut rows: Vec<RawRow>,
    ) -> Result<Self, DataError> {
        let m = feature_names.len();
        for row in &rows {
            if row.features.len() != m {
                return Err(DataError::Shape(format!(
                    "year {} has {} feature cells, expected {m}",
                    row.year,
                    row.features.len()
                )));
            }
        }
        rows.sort_by_key(|r| r.year);
        if let Some(w) = rows.windows(2).find(|w| w[0].year == w[1].year) {
            return Err(DataError::DuplicateYear(w[0].year));
        }
        Ok(Self {
            feature_names,
            target_name: target_name.into(),
            rows,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn rows(&self) -> &[RawRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// True when no cell (feature or target) is missing.
    pub fn is_complete(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.target.is_some() && r.features.iter().all(Option::is_some))
    }

    /// Value of column `c`, where `c == n_features()` is the target.
    fn cell(&self, row: usize, c: usize) -> Option<f64> {
        let r = &self.rows[row];
        if c < r.features.len() {
            r.features[c]
        } else {
            r.target
        }
    }

    fn column_name(&self, c: usize) -> &str {
        if c < self.feature_names.len() {
            &self.feature_names[c]
        } else {
            &self.target_name
        }
    }

    /// Render back to CSV. Missing cells are written as empty strings and
    /// numbers in their shortest round-trip form.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("year");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push(',');
        out.push_str(&self.target_name);
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{}", row.year);
            for v in row.features.iter().chain(std::iter::once(&row.target)) {
                out.push(',');
                if let Some(v) = v {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Read a yield table from a CSV file.
///
/// The first column is the year, the last is the target and everything in
/// between is a feature. Empty cells are missing values; any other
/// non-numeric token (including `NA`) is rejected. Lines starting with `#`
/// are comments.
pub fn load_csv(path: impl AsRef<Path>) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_csv(file)?)
}

/// Parse a yield table from any reader; see [`load_csv`].
pub fn parse_csv(reader: impl Read) -> Result<RawTable, DataError> {
    let (header, records) = read_records(reader)?;
    if header.len() < 3 {
        return Err(DataError::MalformedCsv(format!(
            "need year, at least one feature and a target column; header has {} columns",
            header.len()
        )));
    }
    if records.len() < 2 {
        return Err(DataError::TooFewRows {
            required: 2,
            found: records.len(),
        });
    }
    let feature_names = header[1..header.len() - 1].to_vec();
    let target_name = header[header.len() - 1].clone();
    let rows = records
        .iter()
        .map(|(line, rec)| parse_row(&header, *line, rec, true))
        .collect::<Result<Vec<_>, _>>()?;
    RawTable::new(feature_names, target_name, rows)
}

/// Read query rows for an already trained model.
///
/// Columns after `year` must be exactly `feature_names`, optionally followed
/// by a single target column. At least one row is required.
pub fn load_query_csv(path: impl AsRef<Path>, feature_names: &[String]) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_query_csv(file, feature_names)?)
}

/// See [`load_query_csv`].
pub fn parse_query_csv(reader: impl Read, feature_names: &[String]) -> Result<RawTable, DataError> {
    let (header, records) = read_records(reader)?;
    let m = feature_names.len();
    let has_target = match header.len() {
        n if n == m + 1 => false,
        n if n == m + 2 => true,
        n => {
            return Err(DataError::SchemaMismatch(format!(
                "expected {} or {} columns, found {n}",
                m + 1,
                m + 2
            )))
        }
    };
    if header[1..=m] != *feature_names {
        return Err(DataError::SchemaMismatch(format!(
            "expected features {:?}, found {:?}",
            feature_names,
            &header[1..=m]
        )));
    }
    if records.is_empty() {
        return Err(DataError::TooFewRows {
            required: 1,
            found: 0,
        });
    }
    let target_name = if has_target {
        header[m + 1].clone()
    } else {
        "target".to_string()
    };
    let rows = records
        .iter()
        .map(|(line, rec)| parse_row(&header, *line, rec, has_target))
        .collect::<Result<Vec<_>, _>>()?;
    RawTable::new(feature_names.to_vec(), target_name, rows)
}

type Records = (Vec<String>, Vec<(usize, csv::StringRecord)>);

fn read_records(reader: impl Read) -> Result<Records, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::MalformedCsv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| DataError::MalformedCsv(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        records.push((line, rec));
    }
    Ok((header, records))
}

/// Header and string cells of any CSV, read with the same conventions as
/// [`parse_csv`] (`#` comments, trimmed cells, rectangular records).
pub fn read_plain_csv(reader: impl Read) -> Result<(Vec<String>, Vec<Vec<String>>), DataError> {
    let (header, records) = read_records(reader)?;
    let rows = records
        .into_iter()
        .map(|(_, rec)| rec.iter().map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}

fn parse_row(
    header: &[String],
    line: usize,
    rec: &csv::StringRecord,
    has_target: bool,
) -> Result<RawRow, DataError> {
    let year_cell = &rec[0];
    let year = year_cell.parse::<i64>().map_err(|_| DataError::NonNumeric {
        line,
        column: header[0].clone(),
        value: year_cell.to_string(),
    })?;
    let parse = |i: usize| -> Result<Option<f64>, DataError> {
        let cell = &rec[i];
        if cell.is_empty() {
            return Ok(None);
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(DataError::NonNumeric {
                line,
                column: header[i].clone(),
                value: cell.to_string(),
            }),
        }
    };
    let n_values = header.len() - 1;
    let n_features = if has_target { n_values - 1 } else { n_values };
    let features = (1..=n_features).map(parse).collect::<Result<Vec<_>, _>>()?;
    let target = if has_target { parse(header.len() - 1)? } else { None };
    Ok(RawRow {
        year,
        features,
        target,
    })
}

/// Fill missing cells by averaging the `k` nearest rows.
///
/// Distances are Euclidean over the columns observed in both rows, each
/// column divided by its observed range. Only rows where the missing
/// column is observed are candidates; ties go to the earlier row. Observed
/// cells are never modified. The target column is imputed the same way.
pub fn knn_impute(table: &RawTable, k: usize) -> Result<RawTable, DataError> {
    if k == 0 {
        return Err(DataError::InvalidK);
    }
    let n = table.len();
    let n_cols = table.n_features() + 1;

    let mut scale = vec![1.0; n_cols];
    for (c, s) in scale.iter_mut().enumerate() {
        let observed: Vec<f64> = (0..n).filter_map(|r| table.cell(r, c)).collect();
        if observed.is_empty() {
            return Err(DataError::UnimputableColumn(table.column_name(c).to_string()));
        }
        let lo = observed.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            *s = hi - lo;
        }
    }

    let distance = |a: usize, b: usize| -> f64 {
        let mut ss = 0.0;
        let mut shared = 0;
        for (c, s) in scale.iter().enumerate() {
            if let (Some(x), Some(y)) = (table.cell(a, c), table.cell(b, c)) {
                ss += ((x - y) / s).powi(2);
                shared += 1;
            }
        }
        if shared == 0 {
            f64::INFINITY
        } else {
            ss.sqrt()
        }
    };

    let mut rows = table.rows.clone();
    for (r, row) in rows.iter_mut().enumerate() {
        for c in 0..n_cols {
            if table.cell(r, c).is_some() {
                continue;
            }
            let mut candidates: Vec<(f64, usize)> = (0..n)
                .filter(|&s| s != r && table.cell(s, c).is_some())
                .map(|s| (distance(r, s), s))
                .collect();
            if candidates.len() < k {
                return Err(DataError::NotEnoughNeighbors {
                    column: table.column_name(c).to_string(),
                    k,
                    available: candidates.len(),
                });
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let donors: Vec<f64> = candidates[..k]
                .iter()
                .filter_map(|&(_, s)| table.cell(s, c))
                .collect();
            let fill = mean(&donors);
            if c < row.features.len() {
                row.features[c] = fill;
            } else {
                row.target = fill;
            }
        }
    }
    Ok(RawTable {
        feature_names: table.feature_names.clone(),
        target_name: table.target_name.clone(),
        rows,
    })
}

/// Observed range of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

/// Per-feature min/max used to rescale inputs onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub features: Vec<FeatureRange>,
}

impl NormalizationParams {
    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn normalize_value(&self, feature: usize, value: f64) -> f64 {
        let r = &self.features[feature];
        (value - r.min) / (r.max - r.min)
    }

    pub fn denormalize_value(&self, feature: usize, value: f64) -> f64 {
        let r = &self.features[feature];
        value * (r.max - r.min) + r.min
    }

    /// Rescale a raw feature vector. Values outside the training range map
    /// outside `[0, 1]`.
    pub fn normalize(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .enumerate()
            .map(|(j, &v)| self.normalize_value(j, v))
            .collect()
    }

    pub fn denormalize(&self, scaled: &[f64]) -> Vec<f64> {
        scaled
            .iter()
            .enumerate()
            .map(|(j, &v)| self.denormalize_value(j, v))
            .collect()
    }

    /// Rescale a raw table's feature rows. The table must be complete in its
    /// features and use the same feature names; targets are ignored.
    pub fn normalize_rows(&self, table: &RawTable) -> Result<Vec<Vec<f64>>, DataError> {
        if table.feature_names() != self.feature_names().as_slice() {
            return Err(DataError::SchemaMismatch(format!(
                "expected features {:?}, found {:?}",
                self.feature_names(),
                table.feature_names()
            )));
        }
        table
            .rows()
            .iter()
            .map(|row| {
                row.features
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v.map(|v| self.normalize_value(j, v))
                            .ok_or_else(|| DataError::MissingValue {
                                year: row.year,
                                column: table.feature_names()[j].clone(),
                            })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Complete data set with features on `[0, 1]` and targets in raw units.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    years: Vec<i64>,
    features: Vec<Vec<f64>>,
    target: Vec<f64>,
}

impl Dataset {
    /// Validate and assemble a data set.
    ///
    /// Requires at least one row, strictly increasing years, finite values
    /// and every feature inside `[0, 1]`.
    pub fn new(
        feature_names: Vec<String>,
        years: Vec<i64>,
        features: Vec<Vec<f64>>,
        target: Vec<f64>,
    ) -> Result<Self, DataError> {
        let n = features.len();
        if n == 0 {
            return Err(DataError::TooFewRows {
                required: 1,
                found: 0,
            });
        }
        if years.len() != n || target.len() != n {
            return Err(DataError::Shape(format!(
                "{n} feature rows, {} years, {} targets",
                years.len(),
                target.len()
            )));
        }
        if years.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DataError::Shape("years must be strictly increasing".into()));
        }
        let m = feature_names.len();
        for row in &features {
            if row.len() != m {
                return Err(DataError::Shape(format!(
                    "row has {} features, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DataError::NonFinite(feature_names[j].clone()));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(DataError::NotNormalized {
                        column: feature_names[j].clone(),
                        value: v,
                    });
                }
            }
        }
        if target.iter().any(|t| !t.is_finite()) {
            return Err(DataError::NonFinite("target".into()));
        }
        Ok(Self {
            feature_names,
            years,
            features,
            target,
        })
    }

    /// Convenience constructor for synthetic data: years are `0..n`.
    pub fn with_index_years(
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        target: Vec<f64>,
    ) -> Result<Self, DataError> {
        let years = (0..features.len() as i64).collect();
        Self::new(feature_names, years, features, target)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn years(&self) -> &[i64] {
        &self.years
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }

    fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            years: self.years[range.clone()].to_vec(),
            features: self.features[range.clone()].to_vec(),
            target: self.target[range].to_vec(),
        }
    }
}

/// Map each feature column affinely onto `[0, 1]` using its own min and max.
///
/// The table must be complete (run [`knn_impute`] first). Targets pass
/// through unchanged.
pub fn min_max_normalize(table: &RawTable) -> Result<(Dataset, NormalizationParams), DataError> {
    let mut raw = Vec::with_capacity(table.len());
    let mut target = Vec::with_capacity(table.len());
    for row in table.rows() {
        let mut values = Vec::with_capacity(table.n_features());
        for (j, v) in row.features.iter().enumerate() {
            values.push(v.ok_or_else(|| DataError::MissingValue {
                year: row.year,
                column: table.feature_names()[j].clone(),
            })?);
        }
        raw.push(values);
        target.push(row.target.ok_or_else(|| DataError::MissingValue {
            year: row.year,
            column: table.target_name().to_string(),
        })?);
    }

    let mut ranges = Vec::with_capacity(table.n_features());
    for (j, name) in table.feature_names().iter().enumerate() {
        let (lo, hi) = raw
            .iter()
            .map(|r| r[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if hi <= lo || hi.is_nan() || lo.is_nan() {
            return Err(DataError::DegenerateFeature(name.clone()));
        }
        ranges.push(FeatureRange {
            name: name.clone(),
            min: lo,
            max: hi,
        });
    }
    let params = NormalizationParams { features: ranges };
    let features = raw.iter().map(|r| params.normalize(r)).collect();
    let years = table.rows().iter().map(|r| r.year).collect();
    let ds = Dataset::new(table.feature_names().to_vec(), years, features, target)?;
    Ok((ds, params))
}

/// Split by time: the first `ceil(n * train_fraction)` rows train, the rest
/// test.
pub fn chronological_split(ds: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::InvalidFraction(train_fraction));
    }
    let n = ds.len();
    if n < 3 {
        return Err(DataError::TooFewRows {
            required: 3,
            found: n,
        });
    }
    // Guard against products like 10 * 0.7 = 7.000000000000001.
    let n_train = ((n as f64) * train_fraction - 1e-9).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(DataError::EmptyPartition {
            n,
            train: n_train.min(n),
            test: n - n_train.min(n),
        });
    }
    Ok((ds.slice(0..n_train), ds.slice(n_train..n)))
}

/// Descriptive statistics for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: f64,
}

impl ColumnStats {
    /// Mean, sample standard deviation, range and adjusted Fisher-Pearson
    /// skewness. Skewness is 0 when the column is constant or has two values.
    pub fn compute(name: impl Into<String>, values: &[f64]) -> Result<Self, DataError> {
        let n = values.len();
        if n < 2 {
            return Err(DataError::TooFewRows {
                required: 2,
                found: n,
            });
        }
        let nf = n as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = (values.iter().sum::<f64>() / nf).clamp(min, max);
        let m2 = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf;
        let m3 = values.iter().map(|v| (v - m).powi(3)).sum::<f64>() / nf;
        let std = (m2 * nf / (nf - 1.0)).sqrt();
        let skewness = if m2 == 0.0 || n == 2 {
            0.0
        } else {
            let g1 = m3 / m2.powf(1.5);
            g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
        };
        Ok(Self {
            name: name.into(),
            mean: m,
            std,
            min,
            max,
            skewness,
        })
    }
}

/// Column statistics laid out like a summary-statistics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub columns: Vec<ColumnStats>,
}

impl SummaryStats {
    pub fn get(&self, name: &str) -> Option<&ColumnStats> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// `column,mean,std,min,max,skewness` with four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column,mean,std,min,max,skewness\n");
        for c in &self.columns {
            let _ = writeln!(
                out,
                "{},{:.4},{:.4},{:.4},{:.4},{:.4}",
                c.name, c.mean, c.std, c.min, c.max, c.skewness
            );
        }
        out
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let width = self
            .columns
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let mut out = format!(
            "{:<width$} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            "Column", "Mean", "Std", "Min", "Max", "Skewness"
        );
        for c in &self.columns {
            let _ = writeln!(
                out,
                "{:<width$} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
                c.name, c.mean, c.std, c.min, c.max, c.skewness
            );
        }
        out
    }
}

/// Statistics for every feature column followed by the target.
pub fn summary_stats(ds: &Dataset) -> Result<SummaryStats, DataError> {
    let mut columns = Vec::with_capacity(ds.n_features() + 1);
    for (j, name) in ds.feature_names().iter().enumerate() {
        columns.push(ColumnStats::compute(name, &ds.column(j))?);
    }
    columns.push(ColumnStats::compute("target", ds.target())?);
    Ok(SummaryStats { columns })
}

/// Statistics of a complete raw table, in original units.
pub fn summary_stats_raw(table: &RawTable) -> Result<SummaryStats, DataError> {
    let mut columns = Vec::with_capacity(table.n_features() + 1);
    for c in 0..=table.n_features() {
        let values = (0..table.len())
            .map(|r| {
                table.cell(r, c).ok_or_else(|| DataError::MissingValue {
                    year: table.rows[r].year,
                    column: table.column_name(c).to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        columns.push(ColumnStats::compute(table.column_name(c), &values)?);
    }
    Ok(SummaryStats { columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn row(year: i64, f: &[Option<f64>], t: Option<f64>) -> RawRow {
        RawRow {
            year,
            features: f.to_vec(),
            target: t,
        }
    }

    #[test]
    fn empty_cell_is_missing() {
        let csv = "year,sun,humidity,yield\n2000,1.0,,1.5\n2001,2.0,60,1.3\n2002,3.0,70,1.1\n";
        let t = parse_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.feature_names(), &names(&["sun", "humidity"]));
        assert_eq!(t.target_name(), "yield");
        assert_eq!(t.rows()[0].features, vec![Some(1.0), None]);
        assert_eq!(t.rows()[2].target, Some(1.1));
    }

    #[test]
    fn duplicate_year_rejected() {
        let csv = "year,a,y\n2014,1,1\n2014,2,2\n";
        assert_eq!(parse_csv(csv.as_bytes()), Err(DataError::DuplicateYear(2014)));
    }

    #[test]
    fn rows_sorted_by_year() {
        let csv = "year,a,y\n2003,1,1\n2001,2,2\n2002,3,3\n";
        let t = parse_csv(csv.as_bytes()).unwrap();
        let years: Vec<i64> = t.rows().iter().map(|r| r.year).collect();
        assert_eq!(years, vec![2001, 2002, 2003]);
        assert_eq!(t.rows()[0].target, Some(2.0));
    }

    #[test]
    fn na_token_is_non_numeric() {
        let csv = "year,a,y\n2000,NA,1\n2001,2,2\n";
        assert!(matches!(
            parse_csv(csv.as_bytes()),
            Err(DataError::NonNumeric { ref value, .. }) if value == "NA"
        ));
    }

    #[test]
    fn too_few_rows_and_ragged_rows() {
        assert!(matches!(
            parse_csv("year,a,y\n2000,1,1\n".as_bytes()),
            Err(DataError::TooFewRows { found: 1, .. })
        ));
        assert!(matches!(
            parse_csv("year,a,y\n2000,1,1\n2001,1\n".as_bytes()),
            Err(DataError::MalformedCsv(_))
        ));
    }

    #[test]
    fn comments_are_skipped() {
        let csv = "# generated\nyear,a,y\n2000,1,1\n# mid\n2001,2,2\n";
        assert_eq!(parse_csv(csv.as_bytes()).unwrap().len(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let csv = "year,a,b,y\n2000,0.1,,1.5\n2001,2,3.25,\n";
        let t = parse_csv(csv.as_bytes()).unwrap();
        assert_eq!(parse_csv(t.to_csv_string().as_bytes()).unwrap(), t);
    }

    #[test]
    fn query_csv_with_and_without_target() {
        let feats = names(&["a", "b"]);
        let t = parse_query_csv("year,a,b\n2020,1,2\n".as_bytes(), &feats).unwrap();
        assert_eq!(t.rows()[0].target, None);
        let t = parse_query_csv("year,a,b,y\n2020,1,2,3\n".as_bytes(), &feats).unwrap();
        assert_eq!(t.rows()[0].target, Some(3.0));
        assert!(matches!(
            parse_query_csv("year,a,c\n2020,1,2\n".as_bytes(), &feats),
            Err(DataError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn knn_single_neighbor_copies() {
        // Row 0 is closest to row 1 on feature b.
        let t = RawTable::new(
            names(&["f", "b"]),
            "y",
            vec![
                row(0, &[None, Some(0.0)], Some(1.0)),
                row(1, &[Some(0.4), Some(0.1)], Some(1.0)),
                row(2, &[Some(0.9), Some(1.0)], Some(1.0)),
            ],
        )
        .unwrap();
        let filled = knn_impute(&t, 1).unwrap();
        assert_eq!(filled.rows()[0].features[0], Some(0.4));
    }

    #[test]
    fn knn_two_neighbor_mean() {
        let t = RawTable::new(
            names(&["f", "b"]),
            "y",
            vec![
                row(0, &[None, Some(0.5)], Some(1.0)),
                row(1, &[Some(0.2), Some(0.4)], Some(1.0)),
                row(2, &[Some(0.6), Some(0.6)], Some(1.0)),
                row(3, &[Some(5.0), Some(3.0)], Some(1.0)),
            ],
        )
        .unwrap();
        let filled = knn_impute(&t, 2).unwrap();
        let v = filled.rows()[0].features[0].unwrap();
        assert!((v - 0.4).abs() < 1e-15);
    }

    #[test]
    fn knn_errors() {
        let t = RawTable::new(
            names(&["f", "b"]),
            "y",
            vec![
                row(0, &[None, Some(0.5)], Some(1.0)),
                row(1, &[None, Some(0.4)], Some(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(
            knn_impute(&t, 1),
            Err(DataError::UnimputableColumn("f".into()))
        );
        let t = RawTable::new(
            names(&["f"]),
            "y",
            vec![
                row(0, &[None], Some(1.0)),
                row(1, &[Some(2.0)], Some(1.0)),
                row(2, &[Some(3.0)], Some(1.0)),
            ],
        )
        .unwrap();
        assert!(matches!(
            knn_impute(&t, 3),
            Err(DataError::NotEnoughNeighbors { available: 2, .. })
        ));
        assert_eq!(knn_impute(&t, 0), Err(DataError::InvalidK));
    }

    #[test]
    fn knn_imputes_target_too() {
        let t = RawTable::new(
            names(&["f"]),
            "y",
            vec![
                row(0, &[Some(0.0)], Some(1.0)),
                row(1, &[Some(0.1)], None),
                row(2, &[Some(1.0)], Some(3.0)),
            ],
        )
        .unwrap();
        assert_eq!(knn_impute(&t, 1).unwrap().rows()[1].target, Some(1.0));
    }

    #[test]
    fn normalize_direct_formula() {
        let t = RawTable::new(
            names(&["f"]),
            "y",
            vec![
                row(0, &[Some(2.0)], Some(1.5)),
                row(1, &[Some(4.0)], Some(1.33)),
                row(2, &[Some(6.0)], Some(1.3)),
            ],
        )
        .unwrap();
        let (ds, params) = min_max_normalize(&t).unwrap();
        assert_eq!(ds.column(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(ds.target(), &[1.5, 1.33, 1.3]);
        assert_eq!(params.features[0].min, 2.0);
        assert_eq!(params.features[0].max, 6.0);
    }

    #[test]
    fn constant_feature_is_degenerate() {
        let t = RawTable::new(
            names(&["flat"]),
            "y",
            vec![
                row(0, &[Some(5.0)], Some(1.0)),
                row(1, &[Some(5.0)], Some(2.0)),
                row(2, &[Some(5.0)], Some(3.0)),
            ],
        )
        .unwrap();
        assert_eq!(
            min_max_normalize(&t).unwrap_err(),
            DataError::DegenerateFeature("flat".into())
        );
    }

    #[test]
    fn normalize_requires_complete_table() {
        let t = RawTable::new(
            names(&["f"]),
            "y",
            vec![row(0, &[None], Some(1.0)), row(1, &[Some(1.0)], Some(1.0))],
        )
        .unwrap();
        assert!(matches!(
            min_max_normalize(&t),
            Err(DataError::MissingValue { year: 0, .. })
        ));
    }

    fn unit_ds(n: usize) -> Dataset {
        let f = (0..n).map(|i| vec![i as f64 / n as f64]).collect();
        let y = (0..n).map(|i| i as f64).collect();
        Dataset::new(names(&["x"]), (2000..2000 + n as i64).collect(), f, y).unwrap()
    }

    #[test]
    fn split_matches_fourteen_three() {
        let (train, test) = chronological_split(&unit_ds(17), 0.8).unwrap();
        assert_eq!(train.len(), 14);
        assert_eq!(test.len(), 3);
        assert_eq!(*train.years().last().unwrap(), 2013);
        assert_eq!(test.years(), &[2014, 2015, 2016]);
    }

    #[test]
    fn split_ceil_and_boundaries() {
        let (train, test) = chronological_split(&unit_ds(5), 0.8).unwrap();
        assert_eq!((train.len(), test.len()), (4, 1));
        let (train, _) = chronological_split(&unit_ds(10), 0.7).unwrap();
        assert_eq!(train.len(), 7);
        assert!(matches!(
            chronological_split(&unit_ds(3), 0.99),
            Err(DataError::EmptyPartition { .. })
        ));
        assert!(matches!(
            chronological_split(&unit_ds(2), 0.5),
            Err(DataError::TooFewRows { .. })
        ));
        assert_eq!(
            chronological_split(&unit_ds(5), 1.0),
            Err(DataError::InvalidFraction(1.0))
        );
    }

    #[test]
    fn stats_symmetric_and_degenerate() {
        let s = ColumnStats::compute("y", &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std, s.min, s.max, s.skewness), (2.0, 1.0, 1.0, 3.0, 0.0));
        let s = ColumnStats::compute("y", &[2.0, 2.0]).unwrap();
        assert_eq!((s.std, s.skewness), (0.0, 0.0));
        assert!(ColumnStats::compute("y", &[2.0]).is_err());
    }

    #[test]
    fn stats_skewness_matches_adjusted_formula() {
        // Hand computed: mean 2.5, m2 = 2.25 * ... use a right-skewed sample.
        let v = [1.0, 1.0, 2.0, 6.0];
        let s = ColumnStats::compute("y", &v).unwrap();
        let n = 4.0_f64;
        let m = 2.5;
        let m2: f64 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3: f64 = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        let expected = m3 / m2.powf(1.5) * (n * (n - 1.0)).sqrt() / (n - 2.0);
        assert!((s.skewness - expected).abs() < 1e-12);
        assert!(s.skewness > 0.0);
    }

    #[test]
    fn dataset_rejects_out_of_unit_features() {
        assert!(matches!(
            Dataset::with_index_years(names(&["x"]), vec![vec![1.5]], vec![1.0]),
            Err(DataError::NotNormalized { .. })
        ));
    }

    proptest! {
        #[test]
        fn normalization_round_trip(raw in prop::collection::vec(-1e3f64..1e3, 3..40)) {
            let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assume!(hi - lo > 1e-6);
            let rows = raw.iter().enumerate()
                .map(|(i, &v)| row(i as i64, &[Some(v)], Some(0.0)))
                .collect();
            let t = RawTable::new(names(&["x"]), "y", rows).unwrap();
            let (ds, params) = min_max_normalize(&t).unwrap();
            for (i, &v) in raw.iter().enumerate() {
                let s = ds.row(i)[0];
                prop_assert!((0.0..=1.0).contains(&s));
                prop_assert!((params.denormalize_value(0, s) - v).abs() < 1e-9);
            }
            // normalizing an already-unit column with its own params is the identity
            let unit = ds.column(0);
            let rows2 = unit.iter().enumerate()
                .map(|(i, &v)| row(i as i64, &[Some(v)], Some(0.0)))
                .collect();
            let (ds2, _) = min_max_normalize(&RawTable::new(names(&["x"]), "y", rows2).unwrap()).unwrap();
            for (a, b) in ds2.column(0).iter().zip(&unit) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn knn_preserves_observed(cells in prop::collection::vec(
            prop::collection::vec(prop::option::weighted(0.8, 0.0f64..10.0), 3), 4..12)) {
            let rows: Vec<RawRow> = cells.iter().enumerate()
                .map(|(i, c)| row(i as i64, &c[..2], c[2]))
                .collect();
            let t = RawTable::new(names(&["a", "b"]), "y", rows).unwrap();
            if let Ok(filled) = knn_impute(&t, 1) {
                prop_assert!(filled.is_complete());
                for (orig, new) in t.rows().iter().zip(filled.rows()) {
                    for (o, n) in orig.features.iter().zip(&new.features) {
                        if o.is_some() { prop_assert_eq!(o, n); }
                    }
                    if orig.target.is_some() { prop_assert_eq!(orig.target, new.target); }
                }
            }
        }

        #[test]
        fn split_preserves_rows(n in 3usize..60, frac in 0.05f64..0.95) {
            let ds = unit_ds(n);
            if let Ok((train, test)) = chronological_split(&ds, frac) {
                prop_assert_eq!(train.len() + test.len(), n);
                prop_assert!(train.years().last().unwrap() < test.years().first().unwrap());
                prop_assert!(!train.is_empty() && !test.is_empty());
            }
        }
    }
}
