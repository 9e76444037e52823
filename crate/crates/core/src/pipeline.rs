//! End-to-end runs: split, tune on the training part, refit the selected
//! penalty, and evaluate on the held-out part.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, Matrix};
use crate::encode::{split, SplitIndices};
use crate::error::{Error, Result};
use crate::lasso::{self, LassoConfig};
use crate::logistic::{fit_with, LogRegConfig};
use crate::metrics::{auc, pr_curve, roc, PrCurve, RocCurve};
use crate::model::{LinearModel, LogisticModel};
use crate::resample::{resample, SamplingConfig, SamplingScheme};
use crate::seed;
use crate::select::{cv_lasso, cv_logreg, r2_in_sample, r2_out_of_sample, CvOptions, CvReport};

#[derive(Debug, Clone, PartialEq)]
pub struct LassoRun {
    pub split: SplitIndices,
    pub cv: CvReport,
    pub model: LinearModel,
    pub evaluation: RegressionEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionEvaluation {
    pub r2_in_sample: f64,
    pub r2_out_of_sample: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub n_nonzero: usize,
    pub selected_alpha: f64,
}

/// Splits off a test part, picks `alpha` by k-fold CV on the training
/// part, refits on the whole training part and reports R² on both parts.
pub fn run_lasso(
    ds: &EncodedDataset,
    grid: &[f64],
    opts: &CvOptions,
    test_fraction: f64,
    solver: &LassoConfig,
) -> Result<LassoRun> {
    let parts = split(ds, test_fraction, opts.seed)?;
    let train = ds.subset(&parts.train_rows);
    let test = ds.subset(&parts.test_rows);
    let cv = cv_lasso(&train, grid, opts, solver).map_err(|e| e.context("cross-validation"))?;
    let cfg = LassoConfig {
        alpha: cv.selected,
        ..solver.clone()
    };
    let model = if opts.standardize {
        lasso::fit_standardized(&train, &cfg)?
    } else {
        lasso::fit(&train, &cfg)?
    };
    let evaluation = RegressionEvaluation {
        r2_in_sample: r2_in_sample(&train.y, &model.predict(&train.x)?)?,
        r2_out_of_sample: r2_out_of_sample(&test.y, &model.predict(&test.x)?)?,
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        n_nonzero: model.n_nonzero(),
        selected_alpha: cv.selected,
    };
    Ok(LassoRun {
        split: parts,
        cv,
        model,
        evaluation,
    })
}

/// Test-set results for a model refit on one sampling scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: SamplingScheme,
    pub model: LogisticModel,
    pub train_auc: f64,
    pub test_auc: f64,
    pub roc: RocCurve,
    pub pr: PrCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegRun {
    pub split: SplitIndices,
    pub cv: CvReport,
    /// One entry per scheme, in [`SamplingScheme::ALL`] order.
    pub schemes: Vec<SchemeResult>,
}

impl LogRegRun {
    pub fn scheme(&self, scheme: SamplingScheme) -> &SchemeResult {
        self.schemes
            .iter()
            .find(|s| s.scheme == scheme)
            .expect("every scheme is fit")
    }

    pub fn evaluation(&self) -> ClassificationEvaluation {
        ClassificationEvaluation {
            selected_lambda: self.cv.selected,
            n_train: self.split.train_rows.len(),
            n_test: self.split.test_rows.len(),
            schemes: self
                .schemes
                .iter()
                .map(|s| SchemeEvaluation {
                    scheme: s.scheme,
                    train_auc: s.train_auc,
                    test_auc: s.test_auc,
                    average_precision: s.pr.average_precision,
                    n_nonzero: s.model.n_nonzero(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeEvaluation {
    pub scheme: SamplingScheme,
    pub train_auc: f64,
    pub test_auc: f64,
    pub average_precision: f64,
    pub n_nonzero: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEvaluation {
    pub selected_lambda: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub schemes: Vec<SchemeEvaluation>,
}

/// Splits off a test part, selects `lambda` with the three-sample CV
/// procedure, then refits the selected `lambda` on each fully rebalanced
/// training sample and scores it on the test part.
pub fn run_logreg(
    ds: &EncodedDataset,
    grid: &[f64],
    opts: &CvOptions,
    test_fraction: f64,
    solver: &LogRegConfig,
) -> Result<LogRegRun> {
    ds.check_binary()?;
    let parts = split(ds, test_fraction, opts.seed)?;
    let train = ds.subset(&parts.train_rows);
    let test = ds.subset(&parts.test_rows);
    let cv = cv_logreg(&train, grid, opts, solver).map_err(|e| e.context("cross-validation"))?;
    let cfg = LogRegConfig {
        lambda: cv.selected,
        ..solver.clone()
    };
    let mut schemes = Vec::with_capacity(3);
    for (slot, scheme) in SamplingScheme::ALL.into_iter().enumerate() {
        let s = seed::derive(opts.seed, &[u64::MAX, slot as u64]);
        let sample = resample(&train, &SamplingConfig::new(scheme, 1.0, s))?;
        let model = fit_with(&sample, &cfg, opts.standardize)
            .map_err(|e| e.context(format!("refit on {scheme} sample")))?;
        let test_scores = model.decision_function(&test.x)?;
        schemes.push(SchemeResult {
            scheme,
            train_auc: auc(&train.y, &model.decision_function(&train.x)?)?,
            test_auc: auc(&test.y, &test_scores)?,
            roc: roc(&test.y, &test_scores)?,
            pr: pr_curve(&test.y, &test_scores)?,
            model,
        });
    }
    Ok(LogRegRun {
        split: parts,
        cv,
        schemes,
    })
}

/// Writes an encoded dataset as CSV: `row_id`, the feature columns, then
/// the response under `target_name`. Values use the shortest exact form.
pub fn write_encoded_csv<W: Write>(ds: &EncodedDataset, target_name: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = Vec::with_capacity(ds.n_features() + 2);
    header.push("row_id".to_owned());
    header.extend(ds.feature_names.iter().cloned());
    header.push(target_name.to_owned());
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..ds.n_rows() {
        record.clear();
        record.push(ds.row_ids[i].clone());
        record.extend((0..ds.n_features()).map(|j| ds.x.get(i, j).to_string()));
        record.push(ds.y[i].to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the format written by [`write_encoded_csv`].
pub fn read_encoded_csv<R: Read>(input: R) -> Result<EncodedDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.len() < 3 || header[0] != "row_id" {
        return Err(Error::InvalidDataset(
            "encoded file needs a row_id column, at least one feature and a target".into(),
        ));
    }
    let p = header.len() - 2;
    let feature_names = header[1..=p].to_vec();
    let mut columns = vec![Vec::new(); p];
    let mut y = Vec::new();
    let mut row_ids = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec[k].trim().parse::<f64>().map_err(|_| Error::Parse {
                row: i + 1,
                column: header[k].clone(),
                message: format!("cannot parse '{}' as a number", &rec[k]),
            })
        };
        row_ids.push(rec[0].to_owned());
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse(j + 1)?);
        }
        y.push(parse(p + 1)?);
    }
    let x = Matrix::from_columns(y.len(), &columns)?;
    EncodedDataset::new(x, y, feature_names, row_ids)
}

pub fn load_encoded(path: impl AsRef<Path>) -> Result<(EncodedDataset, String)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)
        .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    let ds = read_encoded_csv(bytes.as_slice())
        .map_err(|e| e.context(format!("reading {}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let target = rdr.headers()?.iter().next_back().unwrap_or("y").to_owned();
    Ok((ds, target))
}
