//! L1-penalized logistic regression.
//!
//! Maximizes `ℓ(β0, β) - λ ||β||_1` with
//! `ℓ = (1/N) Σ [y_i η_i - log(1 + exp(η_i))]`, `η_i = β0 + x_i·β`.
//!
//! Each outer iteration replaces `ℓ` by its second-order expansion at the
//! current iterate, which is a weighted least-squares problem in the working
//! response `z` with weights `w = p(1 - p)`, and hands it to the coordinate
//! descent solver with penalty `λ`. A step-halving guard keeps the penalized
//! log-likelihood from decreasing between outer iterations.

use crate::data::{check_binary_labels, EncodedDataset};
use crate::encode::{standardize, Scaling};
use crate::error::{Error, Result};
use crate::lasso::{self, alpha_max_raw, LassoConfig, WarmStart};
use crate::model::{sigmoid, softplus, LogisticModel, WorkingSet};

pub const DEFAULT_PROB_CLAMP: f64 = 1e-5;
pub const DEFAULT_OUTER_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_OUTER: usize = 100;
/// Largest tolerated drop of the penalized log-likelihood per outer step.
pub const MONOTONE_SLACK: f64 = 1e-9;
pub const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegConfig {
    pub lambda: f64,
    pub max_outer: usize,
    pub outer_tol: f64,
    /// Template for the inner solver; its `alpha` and `weights` are replaced
    /// on every outer iteration.
    pub inner: LassoConfig,
    pub prob_clamp: f64,
}

impl LogRegConfig {
    pub fn new(lambda: f64) -> Self {
        LogRegConfig {
            lambda,
            max_outer: DEFAULT_MAX_OUTER,
            outer_tol: DEFAULT_OUTER_TOL,
            inner: LassoConfig::new(lambda),
            prob_clamp: DEFAULT_PROB_CLAMP,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be a nonnegative number, got {}",
                self.lambda
            )));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidParameter(
                "max_outer must be at least 1".into(),
            ));
        }
        if self.outer_tol.is_nan() || self.outer_tol <= 0.0 {
            return Err(Error::InvalidParameter("outer_tol must be positive".into()));
        }
        if !(self.prob_clamp > 0.0 && self.prob_clamp < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "probability clamp must lie in (0, 0.5), got {}",
                self.prob_clamp
            )));
        }
        Ok(())
    }
}

/// A fitted model plus the outer-loop history.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegFit {
    pub model: LogisticModel,
    /// Penalized log-likelihood at the start point, then after every
    /// accepted outer iteration.
    pub objective_trace: Vec<f64>,
    /// Total number of step halvings performed.
    pub halvings: usize,
}

/// Mean log-likelihood `(1/N) Σ [y_i η_i - log(1 + e^{η_i})]`.
pub fn log_likelihood(ds: &EncodedDataset, model: &LogisticModel) -> Result<f64> {
    ds.check_binary()?;
    let eta = model.decision_function(&ds.x)?;
    Ok(mean_log_likelihood(&ds.y, &eta))
}

fn mean_log_likelihood(y: &[f64], eta: &[f64]) -> f64 {
    let total: f64 = y.iter().zip(eta).map(|(y, e)| y * e - softplus(*e)).sum();
    total / y.len() as f64
}

/// `log_likelihood - λ ||β||_1`, the quantity the fit maximizes.
pub fn penalized_log_likelihood(ds: &EncodedDataset, model: &LogisticModel) -> Result<f64> {
    Ok(log_likelihood(ds, model)? - model.lambda * model.l1_norm())
}

/// Working response and weights of the quadratic expansion at `model`,
/// with fitted probabilities clamped to `[eps, 1 - eps]`.
pub fn working_set(ds: &EncodedDataset, model: &LogisticModel, eps: f64) -> Result<WorkingSet> {
    let eta = model.decision_function(&ds.x)?;
    Ok(working_set_from_eta(&ds.y, &eta, eps))
}

fn working_set_from_eta(y: &[f64], eta: &[f64], eps: f64) -> WorkingSet {
    let n = y.len();
    let mut z = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut p_hat = Vec::with_capacity(n);
    for (&yi, &e) in y.iter().zip(eta) {
        let p = sigmoid(e).clamp(eps, 1.0 - eps);
        let wi = p * (1.0 - p);
        z.push(e + (yi - p) / wi);
        w.push(wi);
        p_hat.push(p);
    }
    WorkingSet { z, w, p_hat }
}

/// Smallest `λ` at which the intercept-only model is optimal:
/// `max_j |(1/N) Σ x_ij (y_i - ȳ)|`.
pub fn lambda_max(ds: &EncodedDataset) -> Result<f64> {
    ds.check_binary()?;
    Ok(alpha_max_raw(&ds.x, &ds.y, None))
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn check_labels(ds: &EncodedDataset) -> Result<()> {
    check_binary_labels(&ds.y)?;
    let (neg, pos) = ds.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::DegenerateLabels(format!(
            "labels contain a single class ({pos} positive, {neg} negative)"
        )));
    }
    Ok(())
}

pub fn fit(ds: &EncodedDataset, cfg: &LogRegConfig) -> Result<LogisticModel> {
    fit_traced(ds, cfg, None).map(|f| f.model)
}

/// Outer quadratic-approximation loop, optionally from a warm start.
pub fn fit_traced(
    ds: &EncodedDataset,
    cfg: &LogRegConfig,
    warm: Option<&LogisticModel>,
) -> Result<LogRegFit> {
    cfg.validate()?;
    check_labels(ds)?;
    let n = ds.n_rows() as f64;
    let p = ds.n_features();
    let lambda = cfg.lambda;

    let penalized = |b0: f64, beta: &[f64]| -> Result<f64> {
        let eta = ds.x.affine(b0, beta)?;
        Ok(mean_log_likelihood(&ds.y, &eta) - lambda * beta.iter().map(|b| b.abs()).sum::<f64>())
    };

    let mean_y = ds.y.iter().sum::<f64>() / n;
    let null_intercept = logit(mean_y);
    let make = |b0: f64, beta: Vec<f64>, iters: usize, converged: bool| LogisticModel {
        intercept: b0,
        coefficients: beta,
        lambda,
        feature_names: ds.feature_names.clone(),
        n_outer_iterations: iters,
        converged,
    };

    if warm.is_none() && lambda >= alpha_max_raw(&ds.x, &ds.y, None) {
        // Intercept-only model satisfies the optimality conditions exactly.
        let beta = vec![0.0; p];
        let obj = penalized(null_intercept, &beta)?;
        return Ok(LogRegFit {
            model: make(null_intercept, beta, 0, true),
            objective_trace: vec![obj],
            halvings: 0,
        });
    }

    let (mut b0, mut beta) = match warm {
        Some(m) => {
            if m.coefficients.len() != p {
                return Err(Error::DimensionMismatch(format!(
                    "warm start has {} coefficients, data has {} columns",
                    m.coefficients.len(),
                    p
                )));
            }
            (m.intercept, m.coefficients.clone())
        }
        None => (null_intercept, vec![0.0; p]),
    };
    let mut obj = penalized(b0, &beta)?;
    let mut trace = vec![obj];
    let mut halvings = 0;
    let mut converged = false;
    let mut iters = 0;

    let inner = LassoConfig {
        alpha: lambda,
        weights: None,
        ..cfg.inner.clone()
    };

    while iters < cfg.max_outer {
        iters += 1;
        let eta = ds.x.affine(b0, &beta)?;
        let ws = working_set_from_eta(&ds.y, &eta, cfg.prob_clamp);
        let start = WarmStart {
            intercept: b0,
            coefficients: beta.clone(),
        };
        let sol = lasso::solve(&ds.x, &ws.z, &inner, Some(&ws.w), Some(&start))
            .map_err(|e| e.context(format!("inner solve at outer iteration {iters}")))?;

        let mut cand_b0 = sol.intercept;
        let mut cand = sol.coefficients;
        let mut cand_obj = penalized(cand_b0, &cand)?;
        if !cand_obj.is_finite() {
            return Err(Error::NonFinite(format!(
                "penalized log-likelihood at outer iteration {iters}"
            )));
        }
        let mut steps = 0;
        while cand_obj < obj - MONOTONE_SLACK && steps < MAX_HALVINGS {
            cand_b0 = 0.5 * (cand_b0 + b0);
            for (c, b) in cand.iter_mut().zip(&beta) {
                *c = 0.5 * (*c + b);
            }
            cand_obj = penalized(cand_b0, &cand)?;
            steps += 1;
        }
        halvings += steps;
        if cand_obj < obj - MONOTONE_SLACK {
            // no ascent along this direction; keep the current iterate
            break;
        }

        let delta = cand
            .iter()
            .zip(&beta)
            .map(|(c, b)| (c - b).abs())
            .fold((cand_b0 - b0).abs(), f64::max);
        b0 = cand_b0;
        beta = cand;
        obj = cand_obj;
        trace.push(obj);
        if delta <= cfg.outer_tol {
            converged = true;
            break;
        }
    }

    Ok(LogRegFit {
        model: make(b0, beta, iters, converged),
        objective_trace: trace,
        halvings,
    })
}

/// Standardizes the columns, fits, and maps coefficients back to the
/// original feature scale.
pub fn fit_standardized(ds: &EncodedDataset, cfg: &LogRegConfig) -> Result<LogisticModel> {
    let (sds, scaling) = standardize(ds)?;
    let fitted = fit(&sds, cfg)?;
    Ok(destandardized(fitted, &scaling))
}

pub(crate) fn destandardized(model: LogisticModel, scaling: &Scaling) -> LogisticModel {
    let (intercept, coefficients) = scaling.destandardize(model.intercept, &model.coefficients);
    LogisticModel {
        intercept,
        coefficients,
        ..model
    }
}

/// Fits with or without standardization.
pub fn fit_with(
    ds: &EncodedDataset,
    cfg: &LogRegConfig,
    standardize_columns: bool,
) -> Result<LogisticModel> {
    if standardize_columns {
        fit_standardized(ds, cfg)
    } else {
        fit(ds, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn ds(rows: &[&[f64]], y: &[f64]) -> EncodedDataset {
        EncodedDataset::from_parts(Matrix::from_rows(rows).unwrap(), y.to_vec()).unwrap()
    }

    fn model(b0: f64, beta: Vec<f64>) -> LogisticModel {
        let names = (1..=beta.len()).map(|j| format!("f{j}")).collect();
        LogisticModel {
            intercept: b0,
            coefficients: beta,
            ..LogisticModel::zero(names, 0.0)
        }
    }

    #[test]
    fn log_likelihood_examples() {
        let d = ds(&[&[1.0], &[-3.0], &[0.5]], &[1.0, 0.0, 1.0]);
        let ll = log_likelihood(&d, &model(0.0, vec![0.0])).unwrap();
        assert!((ll + 2f64.ln()).abs() < 1e-15);

        let ones = ds(&[&[1.0], &[2.0]], &[1.0, 1.0]);
        let ll = log_likelihood(&ones, &model(30.0, vec![0.0])).unwrap();
        assert!(ll < 0.0 && ll > -1e-12);

        let d = ds(&[&[2.0], &[-2.0]], &[1.0, 0.0]);
        let ll = log_likelihood(&d, &model(0.0, vec![1.0])).unwrap();
        let e2 = 2f64.exp();
        let want = 0.5 * ((2.0 - (1.0 + e2).ln()) + (0.0 - (1.0 + 1.0 / e2).ln()));
        assert!((ll - want).abs() < 1e-15);
        assert!((ll + 0.126928).abs() < 1e-6);

        let big = ds(&[&[1.0], &[-1.0]], &[0.0, 1.0]);
        assert!(log_likelihood(&big, &model(0.0, vec![700.0]))
            .unwrap()
            .is_finite());

        let bad = ds(&[&[1.0], &[2.0]], &[0.5, 1.0]);
        assert!(log_likelihood(&bad, &model(0.0, vec![0.0])).is_err());
    }

    #[test]
    fn working_set_examples() {
        let d = ds(&[&[1.0], &[2.0]], &[1.0, 0.0]);
        let ws = working_set(&d, &model(0.0, vec![0.0]), 1e-5).unwrap();
        assert_eq!(ws.p_hat, vec![0.5, 0.5]);
        assert_eq!(ws.w, vec![0.25, 0.25]);
        assert_eq!(ws.z, vec![2.0, -2.0]);

        let d = ds(&[&[0.0]], &[0.0]);
        let eps = 1e-5;
        let ws = working_set(&d, &model(30.0, vec![0.0]), eps).unwrap();
        assert_eq!(ws.p_hat[0], 1.0 - eps);
        assert!((ws.w[0] / (eps * (1.0 - eps)) - 1.0).abs() < 1e-10);
        assert!(ws.z[0].is_finite());
    }

    #[test]
    fn single_class_is_degenerate() {
        let d = ds(&[&[1.0], &[2.0]], &[1.0, 1.0]);
        assert!(matches!(
            fit(&d, &LogRegConfig::new(0.1)),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn null_model_above_lambda_max() {
        let d = ds(
            &[
                &[1.0, 0.0],
                &[2.0, 1.0],
                &[0.5, -1.0],
                &[-1.0, 2.0],
                &[0.0, 0.3],
            ],
            &[1.0, 1.0, 0.0, 0.0, 1.0],
        );
        let lmax = lambda_max(&d).unwrap();
        let m = fit(&d, &LogRegConfig::new(lmax)).unwrap();
        assert!(m.coefficients.iter().all(|&b| b == 0.0));
        assert!((m.intercept - (0.6f64 / 0.4).ln()).abs() < 1e-12);
        // just below the threshold the model must move
        let m = fit(&d, &LogRegConfig::new(lmax * 0.5)).unwrap();
        assert!(m.n_nonzero() > 0);
    }

    #[test]
    fn separable_data_stays_finite() {
        let d = ds(
            &[
                &[-2.0],
                &[-1.5],
                &[-1.0],
                &[-0.5],
                &[0.5],
                &[1.0],
                &[1.5],
                &[2.0],
            ],
            &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        );
        let f = fit_traced(&d, &LogRegConfig::new(0.01), None).unwrap();
        assert!(f.model.converged);
        assert!(f.model.coefficients[0].is_finite() && f.model.coefficients[0] > 0.0);
        for w in f.objective_trace.windows(2) {
            assert!(w[1] >= w[0] - MONOTONE_SLACK);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let d = ds(&[&[1.0], &[2.0]], &[1.0, 0.0]);
        assert!(fit(&d, &LogRegConfig::new(-0.1)).is_err());
        let mut c = LogRegConfig::new(0.1);
        c.prob_clamp = 0.5;
        assert!(fit(&d, &c).is_err());
        let mut c = LogRegConfig::new(0.1);
        c.max_outer = 0;
        assert!(fit(&d, &c).is_err());
    }
}
