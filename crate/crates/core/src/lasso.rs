//! L1-penalized least squares by cyclic coordinate descent.
//!
//! Minimizes
//!
//! ```text
//! (1/2N) Σ_i w_i (y_i - β0 - x_i·β)² + α ||β||_1
//! ```
//!
//! with unit weights by default. Each coordinate step is the exact
//! minimizer over β_j with everything else fixed:
//!
//! ```text
//! β_j <- S((1/N) Σ_i w_i x_ij (y_i - ŷ_i^(j)), α) / c_j,   c_j = (1/N) Σ_i w_i x_ij²
//! ```
//!
//! where `ŷ^(j)` is the fit without feature j. For standardized columns
//! `c_j = 1` and the divisor disappears. The intercept is never penalized and
//! is reset to the weighted mean of the intercept-free residual once per
//! sweep.

use crate::data::{EncodedDataset, Matrix};
use crate::encode::{standardize, Scaling};
use crate::error::{Error, Result};
use crate::model::LinearModel;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

/// Soft-thresholding operator `sign(z) · max(|z| - gamma, 0)`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0, "soft-threshold level must be nonnegative");
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoConfig {
    pub alpha: f64,
    pub max_sweeps: usize,
    /// Convergence threshold on the largest coefficient change in a sweep.
    pub tol: f64,
    /// Observation weights; `None` means all ones.
    pub weights: Option<Vec<f64>>,
}

impl LassoConfig {
    pub fn new(alpha: f64) -> Self {
        LassoConfig {
            alpha,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            tol: DEFAULT_TOL,
            weights: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a nonnegative number, got {}",
                self.alpha
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParameter(
                "max_sweeps must be at least 1".into(),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Starting point for a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl From<&LinearModel> for WarmStart {
    fn from(m: &LinearModel) -> Self {
        WarmStart {
            intercept: m.intercept,
            coefficients: m.coefficients.clone(),
        }
    }
}

/// A fitted model plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub model: LinearModel,
    /// Objective at the start point, then after every sweep.
    pub objective_trace: Vec<f64>,
    pub kkt_residual: f64,
}

/// Raw solver output on whatever columns it was given.
#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
    pub kkt_residual: f64,
}

fn check_weights(weights: Option<&[f64]>, n: usize) -> Result<()> {
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} rows",
                w.len(),
                n
            )));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
    }
    Ok(())
}

#[inline]
fn weight(weights: Option<&[f64]>, i: usize) -> f64 {
    weights.map_or(1.0, |w| w[i])
}

/// Weighted mean of `values`; with unit weights this is exactly `Σ v / N`.
fn weighted_mean(values: &[f64], weights: Option<&[f64]>) -> f64 {
    match weights {
        None => values.iter().sum::<f64>() / values.len() as f64,
        Some(w) => {
            let num: f64 = values.iter().zip(w).map(|(v, w)| w * v).sum();
            num / w.iter().sum::<f64>()
        }
    }
}

/// `(1/N) Σ w_i x_ij r_i` for every column, with `r_i = resid_i - intercept`.
fn gradients(x: &Matrix, resid: &[f64], intercept: f64, weights: Option<&[f64]>) -> Vec<f64> {
    let n = x.n_rows() as f64;
    x.columns()
        .map(|col| {
            let s: f64 = match weights {
                None => col
                    .iter()
                    .zip(resid)
                    .map(|(x, s)| x * (s - intercept))
                    .sum(),
                Some(w) => col
                    .iter()
                    .zip(resid)
                    .zip(w)
                    .map(|((x, s), w)| w * x * (s - intercept))
                    .sum(),
            };
            s / n
        })
        .collect()
}

fn kkt_from_parts(
    x: &Matrix,
    resid: &[f64],
    intercept: f64,
    coefficients: &[f64],
    alpha: f64,
    weights: Option<&[f64]>,
) -> f64 {
    let n = x.n_rows() as f64;
    let intercept_grad: f64 = resid
        .iter()
        .enumerate()
        .map(|(i, s)| weight(weights, i) * (s - intercept))
        .sum::<f64>()
        / n;
    gradients(x, resid, intercept, weights)
        .into_iter()
        .zip(coefficients)
        .map(|(g, &b)| {
            if b != 0.0 {
                (g - alpha * b.signum()).abs()
            } else {
                (g.abs() - alpha).max(0.0)
            }
        })
        .fold(intercept_grad.abs(), f64::max)
}

fn objective_from_parts(
    resid: &[f64],
    intercept: f64,
    coefficients: &[f64],
    alpha: f64,
    weights: Option<&[f64]>,
) -> f64 {
    let n = resid.len() as f64;
    let loss: f64 = resid
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = s - intercept;
            weight(weights, i) * r * r
        })
        .sum();
    loss / (2.0 * n) + alpha * coefficients.iter().map(|b| b.abs()).sum::<f64>()
}

/// Cyclic coordinate descent on raw columns.
pub(crate) fn solve(
    x: &Matrix,
    y: &[f64],
    cfg: &LassoConfig,
    weights: Option<&[f64]>,
    warm: Option<&WarmStart>,
) -> Result<Solution> {
    cfg.validate()?;
    let (n, p) = (x.n_rows(), x.n_cols());
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} rows",
            y.len(),
            n
        )));
    }
    check_weights(weights, n)?;
    let alpha = cfg.alpha;
    let nf = n as f64;

    let col_scale: Vec<f64> = x
        .columns()
        .map(|col| {
            col.iter()
                .enumerate()
                .map(|(i, v)| weight(weights, i) * v * v)
                .sum::<f64>()
                / nf
        })
        .collect();

    let mut beta = vec![0.0; p];
    if let Some(w) = warm {
        if w.coefficients.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "warm start has {} coefficients, data has {} columns",
                w.coefficients.len(),
                p
            )));
        }
        for (b, (&v, &c)) in beta.iter_mut().zip(w.coefficients.iter().zip(&col_scale)) {
            // columns with no weighted mass stay at zero
            *b = if c > 0.0 { v } else { 0.0 };
        }
    }

    // `resid` excludes the intercept: resid_i = y_i - x_i·β.
    let mut resid = y.to_vec();
    for (j, &b) in beta.iter().enumerate() {
        if b != 0.0 {
            for (r, &xv) in resid.iter_mut().zip(x.column(j)) {
                *r -= xv * b;
            }
        }
    }
    let mut intercept = match warm {
        Some(w) => w.intercept,
        None => weighted_mean(&resid, weights),
    };

    let mut trace = vec![objective_from_parts(
        &resid, intercept, &beta, alpha, weights,
    )];
    let mut converged = false;
    let mut sweeps = 0;
    let mut kkt = f64::INFINITY;

    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let new_intercept = weighted_mean(&resid, weights);
        if !new_intercept.is_finite() {
            return Err(Error::NonFinite(format!("intercept at sweep {sweeps}")));
        }
        let mut max_delta = (new_intercept - intercept).abs();
        intercept = new_intercept;

        for j in 0..p {
            let c = col_scale[j];
            if c == 0.0 {
                continue;
            }
            let col = x.column(j);
            let old = beta[j];
            let dot: f64 = match weights {
                None => col
                    .iter()
                    .zip(&resid)
                    .map(|(x, s)| x * (s - intercept))
                    .sum(),
                Some(w) => col
                    .iter()
                    .zip(&resid)
                    .zip(w)
                    .map(|((x, s), w)| w * x * (s - intercept))
                    .sum(),
            };
            let rho = dot / nf + c * old;
            let new = soft_threshold(rho, alpha) / c;
            if !new.is_finite() {
                return Err(Error::NonFinite(format!(
                    "coefficient {j} at sweep {sweeps}"
                )));
            }
            let delta = new - old;
            if delta != 0.0 {
                for (r, &xv) in resid.iter_mut().zip(col) {
                    *r -= xv * delta;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }

        let obj = objective_from_parts(&resid, intercept, &beta, alpha, weights);
        if !obj.is_finite() {
            return Err(Error::NonFinite(format!("objective at sweep {sweeps}")));
        }
        trace.push(obj);

        if max_delta <= cfg.tol {
            kkt = kkt_from_parts(x, &resid, intercept, &beta, alpha, weights);
            // A step-size criterion alone can stop early on correlated
            // columns, so also require the optimality conditions to hold.
            if kkt <= cfg.tol || max_delta == 0.0 {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        kkt = kkt_from_parts(x, &resid, intercept, &beta, alpha, weights);
    }

    Ok(Solution {
        intercept,
        coefficients: beta,
        sweeps,
        converged,
        objective_trace: trace,
        kkt_residual: kkt,
    })
}

fn weights_of(cfg: &LassoConfig) -> Option<&[f64]> {
    cfg.weights.as_deref()
}

/// Fits on the columns as given (no standardization).
pub fn fit(ds: &EncodedDataset, cfg: &LassoConfig) -> Result<LinearModel> {
    fit_warm(ds, cfg, None).map(|f| f.model)
}

/// Fits on the columns as given, optionally from a warm start, returning
/// the per-sweep objective trace alongside the model.
pub fn fit_warm(
    ds: &EncodedDataset,
    cfg: &LassoConfig,
    warm: Option<&WarmStart>,
) -> Result<LassoFit> {
    let sol = solve(&ds.x, &ds.y, cfg, weights_of(cfg), warm)?;
    Ok(LassoFit {
        model: LinearModel {
            intercept: sol.intercept,
            coefficients: sol.coefficients,
            alpha: cfg.alpha,
            feature_names: ds.feature_names.clone(),
            n_iterations: sol.sweeps,
            converged: sol.converged,
        },
        objective_trace: sol.objective_trace,
        kkt_residual: sol.kkt_residual,
    })
}

/// Standardizes the columns, fits, and returns coefficients on the
/// original feature scale. The penalty applies to standardized coefficients.
pub fn fit_standardized(ds: &EncodedDataset, cfg: &LassoConfig) -> Result<LinearModel> {
    let (sds, scaling) = standardize(ds)?;
    let fitted = fit(&sds, cfg)?;
    Ok(destandardized(fitted, &scaling))
}

pub(crate) fn destandardized(model: LinearModel, scaling: &Scaling) -> LinearModel {
    let (intercept, coefficients) = scaling.destandardize(model.intercept, &model.coefficients);
    LinearModel {
        intercept,
        coefficients,
        ..model
    }
}

/// Fits every penalty in `alphas`, solving from the largest value down with
/// warm starts. Models come back in the order of `alphas`.
pub fn fit_path(
    ds: &EncodedDataset,
    alphas: &[f64],
    template: &LassoConfig,
    standardize_columns: bool,
) -> Result<Vec<LinearModel>> {
    let (work, scaling) = if standardize_columns {
        let (s, sc) = standardize(ds)?;
        (s, Some(sc))
    } else {
        (ds.clone(), None)
    };
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&a, &b| alphas[b].total_cmp(&alphas[a]).then(a.cmp(&b)));

    let mut out: Vec<Option<LinearModel>> = vec![None; alphas.len()];
    let mut warm: Option<WarmStart> = None;
    for idx in order {
        let cfg = LassoConfig {
            alpha: alphas[idx],
            ..template.clone()
        };
        let fitted = fit_warm(&work, &cfg, warm.as_ref())?.model;
        warm = Some(WarmStart::from(&fitted));
        out[idx] = Some(match &scaling {
            Some(sc) => destandardized(fitted, sc),
            None => fitted,
        });
    }
    Ok(out
        .into_iter()
        .map(|m| m.expect("every index visited"))
        .collect())
}

/// Value of the penalized objective for `model` on `ds`.
pub fn objective(ds: &EncodedDataset, model: &LinearModel, weights: Option<&[f64]>) -> Result<f64> {
    check_weights(weights, ds.n_rows())?;
    let fitted = model.predict(&ds.x)?;
    let n = ds.n_rows() as f64;
    let loss: f64 =
        ds.y.iter()
            .zip(&fitted)
            .enumerate()
            .map(|(i, (y, f))| weight(weights, i) * (y - f) * (y - f))
            .sum();
    Ok(loss / (2.0 * n) + model.alpha * model.l1_norm())
}

/// Largest violation of the optimality conditions at `model`: for active
/// coordinates `|g_j - α sign(β_j)|`, for inactive ones `max(|g_j| - α, 0)`,
/// with `g_j = (1/N) Σ w_i x_ij r_i`; the intercept contributes `|(1/N) Σ w_i r_i|`.
pub fn kkt_residual(
    ds: &EncodedDataset,
    model: &LinearModel,
    weights: Option<&[f64]>,
) -> Result<f64> {
    check_weights(weights, ds.n_rows())?;
    if model.coefficients.len() != ds.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} coefficients, data has {} columns",
            model.coefficients.len(),
            ds.n_features()
        )));
    }
    let partial = ds.x.affine(0.0, &model.coefficients)?;
    let resid: Vec<f64> = ds.y.iter().zip(&partial).map(|(y, f)| y - f).collect();
    Ok(kkt_from_parts(
        &ds.x,
        &resid,
        model.intercept,
        &model.coefficients,
        model.alpha,
        weights,
    ))
}

/// Smallest penalty at which the all-zero coefficient vector is optimal:
/// `max_j |(1/N) Σ w_i x_ij (y_i - ȳ_w)|`.
pub fn alpha_max(ds: &EncodedDataset, weights: Option<&[f64]>) -> Result<f64> {
    check_weights(weights, ds.n_rows())?;
    Ok(alpha_max_raw(&ds.x, &ds.y, weights))
}

pub(crate) fn alpha_max_raw(x: &Matrix, y: &[f64], weights: Option<&[f64]>) -> f64 {
    let mean = weighted_mean(y, weights);
    gradients(x, y, mean, weights)
        .into_iter()
        .fold(0.0, |m, g| m.max(g.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: &[&[f64]], y: &[f64]) -> EncodedDataset {
        EncodedDataset::from_parts(Matrix::from_rows(rows).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        for z in [-7.25, -1e-300, 0.0, 2.5, 1e300] {
            assert_eq!(soft_threshold(z, 0.0), z);
        }
    }

    #[test]
    fn objective_examples() {
        let d = ds(&[&[1.0], &[2.0]], &[2.0, -2.0]);
        let zero = LinearModel::zero(d.feature_names.clone(), 0.0);
        assert_eq!(objective(&d, &zero, None).unwrap(), 2.0);

        let d = ds(&[&[0.0]], &[0.0]);
        let m = LinearModel {
            coefficients: vec![1.0],
            ..LinearModel::zero(d.feature_names.clone(), 0.5)
        };
        assert_eq!(objective(&d, &m, None).unwrap(), 0.5);

        let d = ds(&[&[1.0], &[2.0]], &[3.0, 5.0]);
        let perfect = LinearModel {
            intercept: 1.0,
            coefficients: vec![2.0],
            ..LinearModel::zero(d.feature_names.clone(), 0.0)
        };
        assert_eq!(objective(&d, &perfect, None).unwrap(), 0.0);
    }

    #[test]
    fn full_shrinkage_above_alpha_max() {
        let d = ds(
            &[&[1.0, 0.5], &[2.0, -1.0], &[4.0, 3.0], &[-1.0, 2.0]],
            &[1.0, 3.0, 2.0, 7.0],
        );
        let amax = alpha_max(&d, None).unwrap();
        let m = fit(&d, &LassoConfig::new(amax)).unwrap();
        assert!(m.coefficients.iter().all(|&b| b == 0.0));
        assert_eq!(m.intercept, d.y.iter().sum::<f64>() / 4.0);
        assert!(m.converged);
        assert_eq!(kkt_residual(&d, &m, None).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_solution_violates_kkt() {
        let d = ds(
            &[
                &[1.0, 0.5],
                &[2.0, -1.0],
                &[4.0, 3.0],
                &[-1.0, 2.0],
                &[0.0, 1.0],
            ],
            &[1.0, 3.0, 2.0, 7.0, 0.5],
        );
        let cfg = LassoConfig::new(0.1).with_tol(1e-10);
        let m = fit(&d, &cfg).unwrap();
        assert!(kkt_residual(&d, &m, None).unwrap() <= 1e-6);
        let mut bad = m.clone();
        bad.coefficients[0] += 0.05;
        assert!(kkt_residual(&d, &bad, None).unwrap() > cfg.tol);
    }

    #[test]
    fn weighted_fit_matches_row_duplication() {
        let rows: &[&[f64]] = &[&[1.0, 0.5], &[2.0, -1.0], &[4.0, 3.0], &[-1.0, 2.0]];
        let y = [1.0, 3.0, 2.0, 7.0];
        let d = ds(rows, &y);
        let weighted = fit(
            &d,
            &LassoConfig::new(0.05)
                .with_tol(1e-12)
                .with_weights(vec![2.0, 1.0, 1.0, 1.0]),
        )
        .unwrap();
        let dup = ds(
            &[rows[0], rows[0], rows[1], rows[2], rows[3]],
            &[1.0, 1.0, 3.0, 2.0, 7.0],
        );
        // duplicating a row doubles its weight but also changes N
        let cfg = LassoConfig::new(0.05 * 4.0 / 5.0).with_tol(1e-12);
        let plain = fit(&dup, &cfg).unwrap();
        for (a, b) in weighted.coefficients.iter().zip(&plain.coefficients) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!((weighted.intercept - plain.intercept).abs() < 1e-8);
    }

    #[test]
    fn constant_columns_stay_zero() {
        let d = ds(&[&[0.0, 1.0], &[0.0, 2.0], &[0.0, 3.0]], &[1.0, 2.0, 3.5]);
        let m = fit(&d, &LassoConfig::new(0.0)).unwrap();
        assert_eq!(m.coefficients[0], 0.0);
        let s = fit_standardized(&d, &LassoConfig::new(0.01)).unwrap();
        assert_eq!(s.coefficients[0], 0.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let d = ds(&[&[1.0], &[2.0]], &[1.0, 2.0]);
        assert!(fit(&d, &LassoConfig::new(-1.0)).is_err());
        assert!(fit(&d, &LassoConfig::new(1.0).with_tol(0.0)).is_err());
        assert!(fit(&d, &LassoConfig::new(1.0).with_max_sweeps(0)).is_err());
        assert!(fit(&d, &LassoConfig::new(1.0).with_weights(vec![1.0])).is_err());
        assert!(fit(&d, &LassoConfig::new(1.0).with_weights(vec![0.0, 0.0])).is_err());
    }

    #[test]
    fn path_matches_independent_fits() {
        let d = ds(
            &[
                &[1.0, 0.5, 2.0],
                &[2.0, -1.0, 0.0],
                &[4.0, 3.0, 1.0],
                &[-1.0, 2.0, 1.5],
                &[0.5, 0.0, -2.0],
            ],
            &[1.0, 3.0, 2.0, 7.0, -1.0],
        );
        let alphas = [0.01, 1.0, 0.1];
        let cfg = LassoConfig::new(0.0).with_tol(1e-12);
        let path = fit_path(&d, &alphas, &cfg, true).unwrap();
        for (a, m) in alphas.iter().zip(&path) {
            let solo = fit_standardized(
                &d,
                &LassoConfig {
                    alpha: *a,
                    ..cfg.clone()
                },
            )
            .unwrap();
            assert_eq!(m.alpha, *a);
            for (x, y) in m.coefficients.iter().zip(&solo.coefficients) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn objective_never_increases(
            rows in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 4), 6..20),
            noise in proptest::collection::vec(-1.0f64..1.0, 20),
            alpha in 0.0f64..0.5,
        ) {
            let n = rows.len();
            let y: Vec<f64> = rows.iter().zip(&noise).map(|(r, e)| r[0] - 2.0 * r[2] + e).collect();
            let d = EncodedDataset::from_parts(Matrix::from_rows(&rows).unwrap(), y[..n].to_vec()).unwrap();
            let f = fit_warm(&d, &LassoConfig::new(alpha), None).unwrap();
            for w in f.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }
}
