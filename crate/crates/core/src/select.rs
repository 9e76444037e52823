//! k-fold cross-validation, penalty grid search, and R² metrics.
//!
//! Folds run in parallel but every random draw comes from a stream derived
//! from `(seed, fold, grid point, scheme)` and fold results are reduced in
//! index order, so reports do not depend on scheduling.

use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::error::{Error, Result, ResultExt};
use crate::lasso::{fit_path, LassoConfig};
use crate::logistic::{fit_with, LogRegConfig};
use crate::metrics::auc;
use crate::report::fmt_f64;
use crate::resample::{resample, SamplingConfig, SamplingScheme};
use crate::seed;

pub const DEFAULT_FOLDS: usize = 10;

/// `{1e-8, 1e-7, ..., 1e1}`.
pub fn default_alpha_grid() -> Vec<f64> {
    (-8..=1).map(|e| 10f64.powi(e)).collect()
}

pub fn default_lambda_grid() -> Vec<f64> {
    vec![1e-4, 1e-2, 1e-1, 1.0, 10.0, 100.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Mse,
    Auc,
}

/// One held-out evaluation. For AUC scoring there is one cell per sampling
/// scheme; for MSE the scheme is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub grid_index: usize,
    pub fold: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SamplingScheme>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Penalty values in ascending order.
    pub grid: Vec<f64>,
    pub mean_score: Vec<f64>,
    pub std_error: Vec<f64>,
    pub selected: f64,
    pub score_kind: ScoreKind,
    pub folds: usize,
    pub seed: u64,
    /// Whether folds were stratified by class.
    pub stratified: bool,
    pub cells: Vec<CvCell>,
}

impl CvReport {
    pub fn selected_index(&self) -> usize {
        self.grid
            .iter()
            .position(|&g| g == self.selected)
            .expect("selected value is on the grid")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plot-ready table: one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let label = match self.score_kind {
            ScoreKind::Mse => "alpha",
            ScoreKind::Auc => "lambda",
        };
        writeln!(out, "{label},mean_score,std_error")?;
        for ((g, m), s) in self.grid.iter().zip(&self.mean_score).zip(&self.std_error) {
            writeln!(out, "{},{},{}", fmt_f64(*g), fmt_f64(*m), fmt_f64(*s))?;
        }
        Ok(())
    }
}

fn check_folds(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "{k} folds requested for {n} rows"
        )));
    }
    Ok(())
}

/// Random partition of `0..n` into `k` folds whose sizes differ by at most
/// one (the first `n mod k` folds get the extra row). Each fold is sorted.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    check_folds(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

/// Folds stratified by binary label: each class is shuffled and dealt
/// round-robin, continuing across classes, so every fold sees both classes
/// whenever each class has at least `k` rows.
pub fn stratified_kfold_indices(labels: &[f64], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    check_folds(labels.len(), k)?;
    crate::data::check_binary_labels(labels)?;
    let mut rng = seed::rng(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in [0.0, 1.0] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::DegenerateLabels(format!(
                "class {class} has {} rows, fewer than the {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn training_rows(folds: &[Vec<usize>], held_out: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = folds
        .iter()
        .enumerate()
        .filter(|(f, _)| *f != held_out)
        .flat_map(|(_, rows)| rows.iter().copied())
        .collect();
    rows.sort_unstable();
    rows
}

fn sorted_grid(grid: &[f64], name: &str) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if let Some(v) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("invalid {name} value {v}")));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

fn std_error(values: &[f64]) -> f64 {
    let k = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

/// Index of the best score; on ties the larger penalty wins.
fn select(grid: &[f64], scores: &[f64], higher_is_better: bool) -> usize {
    let mut best = 0;
    for i in 1..grid.len() {
        let better = if higher_is_better {
            scores[i] >= scores[best]
        } else {
            scores[i] <= scores[best]
        };
        // grid is ascending, so `>=` / `<=` moves ties toward larger penalties
        if better {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub standardize: bool,
}

impl CvOptions {
    pub fn new(seed: u64) -> Self {
        CvOptions {
            folds: DEFAULT_FOLDS,
            seed,
            standardize: true,
        }
    }

    pub fn with_folds(mut self, folds: usize) -> Self {
        self.folds = folds;
        self
    }
}

/// Cross-validated squared prediction error over an `alpha` grid.
///
/// `mean_score` pools the squared errors of every held-out prediction and
/// divides by N; `std_error` is the standard error of the per-fold MSEs.
/// The selected value minimizes `mean_score`.
pub fn cv_lasso(
    ds: &EncodedDataset,
    grid: &[f64],
    opts: &CvOptions,
    solver: &LassoConfig,
) -> Result<CvReport> {
    let grid = sorted_grid(grid, "alpha")?;
    let folds = kfold_indices(ds.n_rows(), opts.folds, opts.seed)?;

    let per_fold: Vec<Vec<f64>> = (0..folds.len())
        .into_par_iter()
        .map(|f| -> Result<Vec<f64>> {
            let train = ds.subset(&training_rows(&folds, f));
            let test = ds.subset(&folds[f]);
            let models = fit_path(&train, &grid, solver, opts.standardize)
                .context_with(|| format!("fold {f}"))?;
            models
                .iter()
                .map(|m| {
                    let pred = m.predict(&test.x)?;
                    Ok(test
                        .y
                        .iter()
                        .zip(&pred)
                        .map(|(y, p)| (y - p) * (y - p))
                        .sum())
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let n = ds.n_rows() as f64;
    let mut mean_score = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    let mut cells = Vec::new();
    for g in 0..grid.len() {
        let sse: f64 = per_fold.iter().map(|f| f[g]).sum();
        mean_score.push(sse / n);
        let fold_mse: Vec<f64> = per_fold
            .iter()
            .zip(&folds)
            .map(|(f, rows)| f[g] / rows.len() as f64)
            .collect();
        std_err.push(std_error(&fold_mse));
        for (fold, score) in fold_mse.into_iter().enumerate() {
            cells.push(CvCell {
                grid_index: g,
                fold,
                scheme: None,
                score,
            });
        }
    }
    let best = select(&grid, &mean_score, false);
    Ok(CvReport {
        selected: grid[best],
        grid,
        mean_score,
        std_error: std_err,
        score_kind: ScoreKind::Mse,
        folds: opts.folds,
        seed: opts.seed,
        stratified: false,
        cells,
    })
}

/// Penalty selection for the L1 logistic model: for every `lambda` and
/// fold, the training part is rebalanced three ways (minority oversampled
/// to 50/50, majority undersampled to 50/50, unchanged); each sample is fit
/// and scored by AUC on the untouched held-out fold. The score of `lambda`
/// is the average of the three AUCs over all folds; the selected value
/// maximizes it. Folds are stratified by class.
pub fn cv_logreg(
    ds: &EncodedDataset,
    grid: &[f64],
    opts: &CvOptions,
    solver: &LogRegConfig,
) -> Result<CvReport> {
    let grid = sorted_grid(grid, "lambda")?;
    ds.check_binary()?;
    let folds = stratified_kfold_indices(&ds.y, opts.folds, opts.seed)?;

    let tasks: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..folds.len()).map(move |f| (g, f)))
        .collect();
    let results: Vec<[f64; 3]> = tasks
        .par_iter()
        .map(|&(g, f)| -> Result<[f64; 3]> {
            let train = ds.subset(&training_rows(&folds, f));
            let test = ds.subset(&folds[f]);
            let mut out = [0.0; 3];
            for (slot, scheme) in SamplingScheme::ALL.into_iter().enumerate() {
                let s = seed::derive(opts.seed, &[f as u64, g as u64, slot as u64]);
                let score = (|| -> Result<f64> {
                    let sample = resample(&train, &SamplingConfig::new(scheme, 1.0, s))?;
                    let cfg = LogRegConfig {
                        lambda: grid[g],
                        ..solver.clone()
                    };
                    let model = fit_with(&sample, &cfg, opts.standardize)?;
                    auc(&test.y, &model.decision_function(&test.x)?)
                })()
                .context_with(|| format!("fold {f}, lambda {}, scheme {scheme}", grid[g]))?;
                out[slot] = score;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let k = folds.len();
    let mut mean_score = Vec::with_capacity(grid.len());
    let mut std_err = Vec::with_capacity(grid.len());
    let mut cells = Vec::new();
    for g in 0..grid.len() {
        let fold_scores: Vec<f64> = (0..k)
            .map(|f| {
                let r = &results[g * k + f];
                (r[0] + r[1] + r[2]) / 3.0
            })
            .collect();
        mean_score.push(fold_scores.iter().sum::<f64>() / k as f64);
        std_err.push(std_error(&fold_scores));
        for f in 0..k {
            for (slot, scheme) in SamplingScheme::ALL.into_iter().enumerate() {
                cells.push(CvCell {
                    grid_index: g,
                    fold: f,
                    scheme: Some(scheme),
                    score: results[g * k + f][slot],
                });
            }
        }
    }
    let best = select(&grid, &mean_score, true);
    Ok(CvReport {
        selected: grid[best],
        grid,
        mean_score,
        std_error: std_err,
        score_kind: ScoreKind::Auc,
        folds: opts.folds,
        seed: opts.seed,
        stratified: true,
        cells,
    })
}

fn check_pair(y: &[f64], y_hat: &[f64]) -> Result<()> {
    if y.len() != y_hat.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes for {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InvalidParameter(
            "R² needs at least two points".into(),
        ));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Squared sample correlation between predictions and outcomes.
pub fn r2_out_of_sample(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_pair(y, y_hat)?;
    let (my, mh) = (mean(y), mean(y_hat));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(y_hat) {
        let (dy, dh) = (a - my, b - mh);
        sxy += dh * dy;
        sxx += dh * dh;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "predictions or outcomes are constant".into(),
        ));
    }
    Ok((sxy * sxy / (sxx * syy)).min(1.0))
}

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r2_in_sample(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_pair(y, y_hat)?;
    let my = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedCorrelation("outcomes are constant".into()));
    }
    let ss_res: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}
