//! Fitted model records, prediction, and the JSON model file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{Error, Result};

/// Logistic function `1 / (1 + exp(-t))`, evaluated without overflow.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(t))` without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// A fitted L1-penalized least-squares model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub alpha: f64,
    pub feature_names: Vec<String>,
    pub n_iterations: usize,
    pub converged: bool,
}

impl LinearModel {
    /// An all-zero model over `feature_names`.
    pub fn zero(feature_names: Vec<String>, alpha: f64) -> Self {
        LinearModel {
            intercept: 0.0,
            coefficients: vec![0.0; feature_names.len()],
            alpha,
            feature_names,
            n_iterations: 0,
            converged: false,
        }
    }

    /// `intercept + x_i · coefficients` for every row of `x`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.affine(self.intercept, &self.coefficients)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|b| b.abs()).sum()
    }

    pub fn n_nonzero(&self) -> usize {
        self.coefficients.iter().filter(|&&b| b != 0.0).count()
    }
}

/// A fitted L1-penalized logistic regression model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub feature_names: Vec<String>,
    pub n_outer_iterations: usize,
    pub converged: bool,
}

impl LogisticModel {
    pub fn zero(feature_names: Vec<String>, lambda: f64) -> Self {
        LogisticModel {
            intercept: 0.0,
            coefficients: vec![0.0; feature_names.len()],
            lambda,
            feature_names,
            n_outer_iterations: 0,
            converged: false,
        }
    }

    /// Linear predictor `intercept + x_i · coefficients`.
    pub fn decision_function(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.affine(self.intercept, &self.coefficients)
    }

    /// `Pr(y = 1 | x_i)` for every row.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self
            .decision_function(x)?
            .into_iter()
            .map(sigmoid)
            .collect())
    }

    /// The model with intercept and coefficients sign-flipped.
    pub fn negated(&self) -> LogisticModel {
        LogisticModel {
            intercept: -self.intercept,
            coefficients: self.coefficients.iter().map(|b| -b).collect(),
            ..self.clone()
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|b| b.abs()).sum()
    }

    pub fn n_nonzero(&self) -> usize {
        self.coefficients.iter().filter(|&&b| b != 0.0).count()
    }
}

/// Quadratic-approximation quantities at the current logistic iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkingSet {
    /// Working response.
    pub z: Vec<f64>,
    /// Working weights `p(1 - p)`.
    pub w: Vec<f64>,
    /// Fitted probabilities after clamping.
    pub p_hat: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    Logistic,
}

/// On-disk form shared by both model kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub kind: ModelKind,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub feature_names: Vec<String>,
    pub hyperparameter: f64,
    pub converged: bool,
    #[serde(default)]
    pub n_iterations: usize,
}

/// Either fitted model, as read back from a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Linear(LinearModel),
    Logistic(LogisticModel),
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            FittedModel::Linear(_) => ModelKind::Linear,
            FittedModel::Logistic(_) => ModelKind::Logistic,
        }
    }

    pub fn intercept(&self) -> f64 {
        match self {
            FittedModel::Linear(m) => m.intercept,
            FittedModel::Logistic(m) => m.intercept,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        match self {
            FittedModel::Linear(m) => &m.coefficients,
            FittedModel::Logistic(m) => &m.coefficients,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            FittedModel::Linear(m) => &m.feature_names,
            FittedModel::Logistic(m) => &m.feature_names,
        }
    }

    pub fn hyperparameter(&self) -> f64 {
        match self {
            FittedModel::Linear(m) => m.alpha,
            FittedModel::Logistic(m) => m.lambda,
        }
    }

    pub fn to_file(&self) -> ModelFile {
        match self {
            FittedModel::Linear(m) => ModelFile {
                kind: ModelKind::Linear,
                intercept: m.intercept,
                coefficients: m.coefficients.clone(),
                feature_names: m.feature_names.clone(),
                hyperparameter: m.alpha,
                converged: m.converged,
                n_iterations: m.n_iterations,
            },
            FittedModel::Logistic(m) => ModelFile {
                kind: ModelKind::Logistic,
                intercept: m.intercept,
                coefficients: m.coefficients.clone(),
                feature_names: m.feature_names.clone(),
                hyperparameter: m.lambda,
                converged: m.converged,
                n_iterations: m.n_outer_iterations,
            },
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        if file.coefficients.len() != file.feature_names.len() {
            return Err(Error::DimensionMismatch(format!(
                "model file has {} coefficients but {} feature names",
                file.coefficients.len(),
                file.feature_names.len()
            )));
        }
        let finite = file.intercept.is_finite()
            && file.hyperparameter.is_finite()
            && file.coefficients.iter().all(|b| b.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "model file holds non-finite values".into(),
            ));
        }
        if file.hyperparameter < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "negative hyperparameter {}",
                file.hyperparameter
            )));
        }
        Ok(match file.kind {
            ModelKind::Linear => FittedModel::Linear(LinearModel {
                intercept: file.intercept,
                coefficients: file.coefficients,
                alpha: file.hyperparameter,
                feature_names: file.feature_names,
                n_iterations: file.n_iterations,
                converged: file.converged,
            }),
            ModelKind::Logistic => FittedModel::Logistic(LogisticModel {
                intercept: file.intercept,
                coefficients: file.coefficients,
                lambda: file.hyperparameter,
                feature_names: file.feature_names,
                n_outer_iterations: file.n_iterations,
                converged: file.converged,
            }),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        FittedModel::from_file(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        FittedModel::from_json(&text).map_err(|e| e.context(format!("reading {}", path.display())))
    }
}

impl From<LinearModel> for FittedModel {
    fn from(m: LinearModel) -> Self {
        FittedModel::Linear(m)
    }
}

impl From<LogisticModel> for FittedModel {
    fn from(m: LogisticModel) -> Self {
        FittedModel::Logistic(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear(intercept: f64, coefficients: Vec<f64>) -> LinearModel {
        let names = (0..coefficients.len()).map(|j| format!("f{j}")).collect();
        LinearModel {
            intercept,
            coefficients,
            ..LinearModel::zero(names, 0.0)
        }
    }

    fn logistic(intercept: f64, coefficients: Vec<f64>) -> LogisticModel {
        let names = (0..coefficients.len()).map(|j| format!("f{j}")).collect();
        LogisticModel {
            intercept,
            coefficients,
            ..LogisticModel::zero(names, 0.0)
        }
    }

    #[test]
    fn predict_linear_examples() {
        let x = Matrix::from_rows(&[vec![1.0, -2.0], vec![4.0, 0.5]]).unwrap();
        assert_eq!(
            linear(0.0, vec![0.0, 0.0]).predict(&x).unwrap(),
            vec![0.0, 0.0]
        );
        let x1 = Matrix::from_rows(&[vec![3.0]]).unwrap();
        assert_eq!(linear(1.0, vec![2.0]).predict(&x1).unwrap(), vec![7.0]);
        let x2 = Matrix::from_rows(&[vec![2.0, 2.0]]).unwrap();
        assert_eq!(
            linear(0.5, vec![1.0, -1.0]).predict(&x2).unwrap(),
            vec![0.5]
        );
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            linear(0.0, vec![1.0]).predict(&x),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(logistic(0.0, vec![1.0, 2.0, 3.0])
            .predict_proba(&x)
            .is_err());
    }

    #[test]
    fn predict_proba_examples() {
        let x = Matrix::from_rows(&[vec![5.0], vec![-7.0]]).unwrap();
        assert_eq!(
            logistic(0.0, vec![0.0]).predict_proba(&x).unwrap(),
            vec![0.5, 0.5]
        );
        let p = logistic(3f64.ln(), vec![0.0])
            .predict_proba(&Matrix::from_rows(&[vec![5.0]]).unwrap())
            .unwrap();
        assert!((p[0] - 0.75).abs() < 1e-15);
        let p = logistic(0.0, vec![1.0])
            .predict_proba(&Matrix::from_rows(&[vec![-1.0]]).unwrap())
            .unwrap();
        assert!((p[0] - 1.0 / (1.0 + std::f64::consts::E)).abs() < 1e-15);
        assert!((p[0] - 0.26894).abs() < 1e-5);
    }

    #[test]
    fn sigmoid_and_softplus_extremes() {
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!(softplus(700.0).is_finite());
        assert!((softplus(700.0) - 700.0).abs() < 1e-12);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn corrupt_model_file_rejected() {
        assert!(FittedModel::from_json("{\"kind\":\"linear\"").is_err());
        assert!(FittedModel::from_json(
            r#"{"kind":"linear","intercept":0,"coefficients":[1,2],"feature_names":["a"],"hyperparameter":0,"converged":true}"#
        )
        .is_err());
        assert!(FittedModel::from_json(
            r#"{"kind":"cubic","intercept":0,"coefficients":[],"feature_names":[],"hyperparameter":0,"converged":true}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn proba_complement_identity(
            b0 in -20.0f64..20.0,
            b in proptest::collection::vec(-5.0f64..5.0, 3),
            rows in proptest::collection::vec(proptest::collection::vec(-4.0f64..4.0, 3), 1..6),
        ) {
            let x = Matrix::from_rows(&rows).unwrap();
            let m = logistic(b0, b);
            let p = m.predict_proba(&x).unwrap();
            let q = m.negated().predict_proba(&x).unwrap();
            for (a, c) in p.iter().zip(&q) {
                prop_assert!((a + c - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn predict_linear_scales_without_intercept(
            b in proptest::collection::vec(-5.0f64..5.0, 2),
            row in proptest::collection::vec(-4.0f64..4.0, 2),
            a in -3.0f64..3.0,
        ) {
            let m = linear(0.0, b);
            let x = Matrix::from_rows(std::slice::from_ref(&row)).unwrap();
            let ax = Matrix::from_rows(&[row.iter().map(|v| a * v).collect::<Vec<_>>()]).unwrap();
            let base = m.predict(&x).unwrap()[0];
            let scaled = m.predict(&ax).unwrap()[0];
            prop_assert!((scaled - a * base).abs() <= 1e-10);
        }

        #[test]
        fn model_json_round_trip_is_bit_exact(
            b0 in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
            b in proptest::collection::vec(proptest::num::f64::NORMAL, 0..5),
            h in 0.0f64..1e300,
            logistic_kind in any::<bool>(),
        ) {
            let names: Vec<String> = (0..b.len()).map(|j| format!("f{j}")).collect();
            let model: FittedModel = if logistic_kind {
                LogisticModel { intercept: b0, coefficients: b, lambda: h, feature_names: names, n_outer_iterations: 3, converged: true }.into()
            } else {
                LinearModel { intercept: b0, coefficients: b, alpha: h, feature_names: names, n_iterations: 7, converged: false }.into()
            };
            let back = FittedModel::from_json(&model.to_json().unwrap()).unwrap();
            prop_assert_eq!(back.intercept().to_bits(), model.intercept().to_bits());
            prop_assert_eq!(back.hyperparameter().to_bits(), model.hyperparameter().to_bits());
            for (x, y) in back.coefficients().iter().zip(model.coefficients()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
            prop_assert_eq!(back, model);
        }
    }
}
