//! Seeded synthetic datasets with a planted sparse coefficient vector.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{EncodedDataset, Matrix};
use crate::error::{Error, Result};
use crate::model::sigmoid;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Linear,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n: usize,
    pub p: usize,
    /// Number of nonzero true coefficients.
    pub sparsity: usize,
    /// Standard deviation of the gaussian noise (linear kind only).
    pub noise: f64,
    /// Target share of positive labels (logistic kind only).
    pub positive_rate: f64,
    /// Intercept of the linear kind; the logistic kind solves for it.
    pub intercept: f64,
    /// Replaces the randomly drawn true coefficients when given.
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
}

impl SynthSpec {
    pub fn linear(n: usize, p: usize, sparsity: usize, noise: f64) -> Self {
        SynthSpec {
            kind: SynthKind::Linear,
            n,
            p,
            sparsity,
            noise,
            positive_rate: 0.5,
            intercept: 1.0,
            coefficients: None,
        }
    }

    pub fn logistic(n: usize, p: usize, sparsity: usize, positive_rate: f64) -> Self {
        SynthSpec {
            kind: SynthKind::Logistic,
            n,
            p,
            sparsity,
            noise: 0.0,
            positive_rate,
            intercept: 0.0,
            coefficients: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 || self.p == 0 {
            return bad(format!(
                "need n >= 2 and p >= 1, got n={} p={}",
                self.n, self.p
            ));
        }
        if self.sparsity > self.p {
            return bad(format!("sparsity {} exceeds p = {}", self.sparsity, self.p));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!(
                "noise must be a nonnegative number, got {}",
                self.noise
            ));
        }
        if !self.intercept.is_finite() {
            return bad("intercept must be finite".into());
        }
        if self.kind == SynthKind::Logistic
            && !(self.positive_rate > 0.0 && self.positive_rate < 1.0)
        {
            return bad(format!(
                "positive rate must lie in (0, 1), got {}",
                self.positive_rate
            ));
        }
        if let Some(c) = &self.coefficients {
            if c.len() != self.p || c.iter().any(|v| !v.is_finite()) {
                return bad("planted coefficients must be p finite values".into());
            }
        }
        Ok(())
    }
}

/// A generated dataset together with the coefficients that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub dataset: EncodedDataset,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl SyntheticData {
    /// Indices of the nonzero true coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Standard normal features; `sparsity` coefficients drawn with random sign
/// and magnitude in [1, 2] at random positions, unless planted explicitly.
pub fn generate_synthetic(spec: &SynthSpec, seed: u64) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    let (n, p) = (spec.n, spec.p);

    let coefficients = match &spec.coefficients {
        Some(c) => c.clone(),
        None => {
            let mut c = vec![0.0; p];
            let mut support = index::sample(&mut rng, p, spec.sparsity).into_vec();
            support.sort_unstable();
            for j in support {
                let magnitude = rng.random_range(1.0..=2.0);
                c[j] = if rng.random_bool(0.5) {
                    magnitude
                } else {
                    -magnitude
                };
            }
            c
        }
    };

    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n * p {
        data.push(StandardNormal.sample(&mut rng));
    }
    let x = Matrix::from_column_major(n, p, data)?;
    let signal = x.affine(0.0, &coefficients)?;

    let (intercept, y) = match spec.kind {
        SynthKind::Linear => {
            let y = signal
                .iter()
                .map(|s| {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    spec.intercept + s + spec.noise * eps
                })
                .collect();
            (spec.intercept, y)
        }
        SynthKind::Logistic => {
            let b0 = intercept_for_rate(&signal, spec.positive_rate);
            let y = signal
                .iter()
                .map(|s| {
                    let u: f64 = rng.random();
                    if u < sigmoid(b0 + s) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            (b0, y)
        }
    };

    Ok(SyntheticData {
        dataset: EncodedDataset::from_parts(x, y)?,
        intercept,
        coefficients,
    })
}

/// Bisection for the intercept whose mean fitted probability equals `rate`.
fn intercept_for_rate(signal: &[f64], rate: f64) -> f64 {
    let mean_p =
        |b0: f64| signal.iter().map(|s| sigmoid(b0 + s)).sum::<f64>() / signal.len() as f64;
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_p(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_linear_is_exact() {
        let spec = SynthSpec::linear(50, 6, 3, 0.0);
        let d = generate_synthetic(&spec, 1).unwrap();
        let pred = d.dataset.x.affine(d.intercept, &d.coefficients).unwrap();
        for (p, y) in pred.iter().zip(&d.dataset.y) {
            assert!((p - y).abs() < 1e-12);
        }
        assert_eq!(d.support().len(), 3);
    }

    #[test]
    fn zero_sparsity_is_intercept_plus_noise() {
        let d = generate_synthetic(&SynthSpec::linear(40, 4, 0, 0.0), 2).unwrap();
        assert!(d.dataset.y.iter().all(|&v| v == 1.0));
        assert!(d.coefficients.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn positive_rate_is_respected() {
        let d = generate_synthetic(&SynthSpec::logistic(10_000, 5, 3, 0.05), 9).unwrap();
        let rate = d.dataset.y.iter().sum::<f64>() / 10_000.0;
        assert!((rate - 0.05).abs() <= 0.02, "rate {rate}");
        assert!(d.dataset.check_binary().is_ok());
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = SynthSpec::logistic(200, 4, 2, 0.3);
        assert_eq!(
            generate_synthetic(&spec, 5).unwrap(),
            generate_synthetic(&spec, 5).unwrap()
        );
        assert_ne!(
            generate_synthetic(&spec, 5).unwrap().dataset.y,
            generate_synthetic(&spec, 6).unwrap().dataset.y
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate_synthetic(&SynthSpec::linear(10, 3, 4, 1.0), 0).is_err());
        assert!(generate_synthetic(&SynthSpec::linear(10, 3, 1, -1.0), 0).is_err());
        assert!(generate_synthetic(&SynthSpec::logistic(10, 3, 1, 1.0), 0).is_err());
        let mut s = SynthSpec::linear(10, 3, 1, 1.0);
        s.coefficients = Some(vec![1.0]);
        assert!(generate_synthetic(&s, 0).is_err());
    }
}
