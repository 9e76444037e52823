//! Tabular ingestion: CSV reading, top-K one-hot vocabulary, encoding,
//! standardization, and train/test splitting.

use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, Matrix};
use crate::error::{Error, Result};
use crate::seed;

/// Category string used for empty categorical cells.
pub const MISSING_CATEGORY: &str = "<NA>";

/// Default per-column cap on retained categories.
pub const DEFAULT_TOP_K: usize = 100;

/// Default held-out share for train/test splits.
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    TargetNumeric,
    TargetBinary,
    Ignore,
}

impl ColumnKind {
    pub fn is_target(self) -> bool {
        matches!(self, ColumnKind::TargetNumeric | ColumnKind::TargetBinary)
    }
}

/// One entry of a schema file.
///
/// `positive` only applies to binary targets: when present, a cell is a
/// positive case exactly when it matches one of the listed labels (after
/// trimming, case-insensitively). Without it the cell must read `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive: Option<Vec<String>>,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.into(),
            kind,
            positive: None,
        }
    }
}

/// Ordered column specifications with exactly one target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema(pub Vec<ColumnSpec>);

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let schema = Schema(columns);
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let targets = self.0.iter().filter(|c| c.kind.is_target()).count();
        if targets != 1 {
            return Err(Error::Schema(format!(
                "schema must have exactly one target column, found {targets}"
            )));
        }
        let mut seen = HashSet::new();
        for c in &self.0 {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("column '{}' listed twice", c.name)));
            }
        }
        Ok(())
    }

    pub fn target(&self) -> &ColumnSpec {
        self.0
            .iter()
            .find(|c| c.kind.is_target())
            .expect("validated schema has a target")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: Schema = serde_json::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::from(e).context(format!("reading schema {}", path.display())))?;
        Schema::from_json(&text)
            .map_err(|e| e.context(format!("parsing schema {}", path.display())))
    }
}

/// A CSV table held as strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    /// Reads an RFC 4180 CSV with a header row.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = rdr.headers()?.iter().map(str::to_owned).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(RawTable { header, rows })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::from(e).context(format!("opening {}", path.display())))?;
        RawTable::from_reader(file).map_err(|e| e.context(format!("reading {}", path.display())))
    }

    fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// How one schema column maps onto encoded feature columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VocabColumn {
    Numeric {
        name: String,
        index: usize,
    },
    Categorical {
        name: String,
        /// Retained categories, most frequent first.
        categories: Vec<String>,
        /// Feature index of the first retained category.
        offset: usize,
    },
}

/// Everything needed to encode new rows the same way as the fitting data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVocabulary {
    pub k: usize,
    pub columns: Vec<VocabColumn>,
    pub target: ColumnSpec,
}

impl FeatureVocabulary {
    pub fn n_features(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                VocabColumn::Numeric { .. } => 1,
                VocabColumn::Categorical { categories, .. } => categories.len(),
            })
            .sum()
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_features());
        for c in &self.columns {
            match c {
                VocabColumn::Numeric { name, .. } => names.push(name.clone()),
                VocabColumn::Categorical {
                    name, categories, ..
                } => names.extend(categories.iter().map(|cat| one_hot_name(name, cat))),
            }
        }
        names
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn one_hot_name(column: &str, category: &str) -> String {
    format!("{column}={category}")
}

fn category_of(cell: &str) -> &str {
    if cell.trim().is_empty() {
        MISSING_CATEGORY
    } else {
        cell
    }
}

/// The `k` most frequent values of each categorical column, ties broken by
/// ascending string order; numeric columns pass through.
pub fn build_vocabulary(table: &RawTable, schema: &Schema, k: usize) -> Result<FeatureVocabulary> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "top-k cap must be at least 1".into(),
        ));
    }
    schema.validate()?;
    if table.rows.is_empty() {
        return Err(Error::InvalidDataset("table has no data rows".into()));
    }
    for spec in &schema.0 {
        if table.column_index(&spec.name).is_none() {
            return Err(Error::Schema(format!(
                "column '{}' is not in the table header",
                spec.name
            )));
        }
    }

    let mut columns = Vec::new();
    let mut offset = 0usize;
    for spec in &schema.0 {
        let col = table.column_index(&spec.name).expect("checked above");
        match spec.kind {
            ColumnKind::Numeric => {
                columns.push(VocabColumn::Numeric {
                    name: spec.name.clone(),
                    index: offset,
                });
                offset += 1;
            }
            ColumnKind::Categorical => {
                let mut counts: HashMap<&str, usize> = HashMap::new();
                for row in &table.rows {
                    *counts.entry(category_of(&row[col])).or_default() += 1;
                }
                let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
                ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
                ranked.truncate(k);
                let categories: Vec<String> =
                    ranked.into_iter().map(|(c, _)| c.to_owned()).collect();
                let n = categories.len();
                columns.push(VocabColumn::Categorical {
                    name: spec.name.clone(),
                    categories,
                    offset,
                });
                offset += n;
            }
            ColumnKind::TargetNumeric | ColumnKind::TargetBinary | ColumnKind::Ignore => {}
        }
    }
    let vocab = FeatureVocabulary {
        k,
        columns,
        target: schema.target().clone(),
    };
    let names = vocab.feature_names();
    if names.is_empty() {
        return Err(Error::Schema("schema yields no feature columns".into()));
    }
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(Error::Schema(format!(
                "feature name '{name}' is not unique"
            )));
        }
    }
    Ok(vocab)
}

fn parse_number(cell: &str, row: usize, column: &str) -> Result<f64> {
    let trimmed = cell.trim();
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::Parse {
            row,
            column: column.to_owned(),
            message: format!("non-finite value '{trimmed}'"),
        }),
        Err(_) => Err(Error::Parse {
            row,
            column: column.to_owned(),
            message: format!("cannot parse '{trimmed}' as a number"),
        }),
    }
}

fn parse_target(cell: &str, row: usize, spec: &ColumnSpec) -> Result<f64> {
    match spec.kind {
        ColumnKind::TargetNumeric => parse_number(cell, row, &spec.name),
        ColumnKind::TargetBinary => {
            let trimmed = cell.trim();
            if let Some(positive) = &spec.positive {
                let hit = positive
                    .iter()
                    .any(|p| p.trim().eq_ignore_ascii_case(trimmed));
                return Ok(if hit { 1.0 } else { 0.0 });
            }
            match trimmed {
                "1" | "1.0" => Ok(1.0),
                "0" | "0.0" => Ok(0.0),
                other => Err(Error::Parse {
                    row,
                    column: spec.name.clone(),
                    message: format!("binary target must be 0 or 1, got '{other}'"),
                }),
            }
        }
        _ => unreachable!("target spec has a target kind"),
    }
}

/// One-hot encodes `table` with `vocab`. Categories outside the vocabulary
/// encode as all zeros. Row ids are 1-based data row numbers.
pub fn encode(table: &RawTable, vocab: &FeatureVocabulary) -> Result<EncodedDataset> {
    if table.rows.is_empty() {
        return Err(Error::InvalidDataset("table has no data rows".into()));
    }
    let target_col = table
        .column_index(&vocab.target.name)
        .ok_or_else(|| Error::Schema(format!("missing target column '{}'", vocab.target.name)))?;
    let mut sources = Vec::with_capacity(vocab.columns.len());
    for c in &vocab.columns {
        let name = match c {
            VocabColumn::Numeric { name, .. } | VocabColumn::Categorical { name, .. } => name,
        };
        let idx = table
            .column_index(name)
            .ok_or_else(|| Error::Schema(format!("missing column '{name}'")))?;
        sources.push(idx);
    }

    let n = table.rows.len();
    let p = vocab.n_features();
    let mut x = Matrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    let lookups: Vec<Option<HashMap<&str, usize>>> = vocab
        .columns
        .iter()
        .map(|c| match c {
            VocabColumn::Categorical { categories, .. } => Some(
                categories
                    .iter()
                    .enumerate()
                    .map(|(i, cat)| (cat.as_str(), i))
                    .collect(),
            ),
            VocabColumn::Numeric { .. } => None,
        })
        .collect();

    for (i, row) in table.rows.iter().enumerate() {
        let line = i + 1;
        for ((c, &src), lookup) in vocab.columns.iter().zip(&sources).zip(&lookups) {
            match c {
                VocabColumn::Numeric { name, index } => {
                    x.set(i, *index, parse_number(&row[src], line, name)?);
                }
                VocabColumn::Categorical { offset, .. } => {
                    let lookup = lookup.as_ref().expect("categorical lookup");
                    if let Some(&k) = lookup.get(category_of(&row[src])) {
                        x.set(i, offset + k, 1.0);
                    }
                }
            }
        }
        y.push(parse_target(&row[target_col], line, &vocab.target)?);
    }
    let row_ids = (1..=n).map(|i| i.to_string()).collect();
    EncodedDataset::new(x, y, vocab.feature_names(), row_ids)
}

/// Per-column centering and scaling applied before solving.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Columns whose values are all equal; they standardize to all zeros.
    pub constant: Vec<bool>,
}

impl Scaling {
    /// Maps coefficients fitted on standardized columns back to the
    /// original feature scale.
    pub fn destandardize(&self, intercept: f64, coefficients: &[f64]) -> (f64, Vec<f64>) {
        let mut b0 = intercept;
        let coefs: Vec<f64> = coefficients
            .iter()
            .zip(self.scales.iter().zip(&self.constant))
            .map(|(&b, (&s, &c))| if c || b == 0.0 { 0.0 } else { b / s })
            .collect();
        for (b, m) in coefs.iter().zip(&self.means) {
            b0 -= b * m;
        }
        (b0, coefs)
    }

    /// Inverse of [`Scaling::destandardize`] for non-constant columns.
    pub fn standardize_coefficients(
        &self,
        intercept: f64,
        coefficients: &[f64],
    ) -> (f64, Vec<f64>) {
        let mut b0 = intercept;
        for (b, m) in coefficients.iter().zip(&self.means) {
            b0 += b * m;
        }
        let coefs = coefficients
            .iter()
            .zip(self.scales.iter().zip(&self.constant))
            .map(|(&b, (&s, &c))| if c { 0.0 } else { b * s })
            .collect();
        (b0, coefs)
    }
}

/// Centers every column and scales it so that `(1/N) Σ x_ij² = 1`.
pub fn standardize(ds: &EncodedDataset) -> Result<(EncodedDataset, Scaling)> {
    let n = ds.n_rows();
    if n < 2 {
        return Err(Error::InvalidDataset(
            "standardization needs at least two rows".into(),
        ));
    }
    let p = ds.n_features();
    let mut x = ds.x.clone();
    let mut means = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    let mut constant = Vec::with_capacity(p);
    for j in 0..p {
        let col = x.column_mut(j);
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            col.iter_mut().for_each(|v| *v = 0.0);
            means.push(first);
            scales.push(1.0);
            constant.push(true);
            continue;
        }
        let mean = col.iter().sum::<f64>() / n as f64;
        col.iter_mut().for_each(|v| *v -= mean);
        let scale = (col.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        col.iter_mut().for_each(|v| *v /= scale);
        means.push(mean);
        scales.push(scale);
        constant.push(false);
    }
    let out = EncodedDataset {
        x,
        y: ds.y.clone(),
        feature_names: ds.feature_names.clone(),
        row_ids: ds.row_ids.clone(),
    };
    Ok((
        out,
        Scaling {
            means,
            scales,
            constant,
        },
    ))
}

/// A train/test partition of row indices (each list ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
}

/// Uniformly random partition of `0..n` with `round(test_fraction * n)` test rows.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n_test = (test_fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::InvalidParameter(format!(
            "test fraction {test_fraction} on {n} rows leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let mut test_rows = order[..n_test].to_vec();
    let mut train_rows = order[n_test..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();
    Ok(SplitIndices {
        train_rows,
        test_rows,
        seed,
    })
}

pub fn split(ds: &EncodedDataset, test_fraction: f64, seed: u64) -> Result<SplitIndices> {
    split_indices(ds.n_rows(), test_fraction, seed)
}
