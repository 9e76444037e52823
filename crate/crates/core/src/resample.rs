//! Class rebalancing by minority oversampling or majority undersampling,
//! with a sampling frequency `gamma` that interpolates the minority share
//! linearly between the original proportion (`gamma = 0`) and 50/50
//! (`gamma = 1`).

use std::io::Write;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EncodedDataset;
use crate::encode::split;
use crate::error::{Error, Result, ResultExt};
use crate::logistic::{fit_with, LogRegConfig};
use crate::metrics::auc;
use crate::report::fmt_f64;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    Original,
    OversampleMinority,
    UndersampleMajority,
}

impl SamplingScheme {
    /// Scheme order used by every report: oversampled, undersampled, original.
    pub const ALL: [SamplingScheme; 3] = [
        SamplingScheme::OversampleMinority,
        SamplingScheme::UndersampleMajority,
        SamplingScheme::Original,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SamplingScheme::Original => "original",
            SamplingScheme::OversampleMinority => "oversample_minority",
            SamplingScheme::UndersampleMajority => "undersample_majority",
        }
    }

    fn tag(self) -> u64 {
        match self {
            SamplingScheme::OversampleMinority => 1,
            SamplingScheme::UndersampleMajority => 2,
            SamplingScheme::Original => 3,
        }
    }
}

impl std::fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(SamplingScheme::Original),
            "oversample_minority" | "oversample" => Ok(SamplingScheme::OversampleMinority),
            "undersample_majority" | "undersample" => Ok(SamplingScheme::UndersampleMajority),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampling scheme '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub scheme: SamplingScheme,
    pub gamma: f64,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn new(scheme: SamplingScheme, gamma: f64, seed: u64) -> Self {
        SamplingConfig {
            scheme,
            gamma,
            seed,
        }
    }
}

fn round_half_up(v: f64) -> usize {
    (v + 0.5).floor().max(0.0) as usize
}

/// Target minority share `π0 + γ (0.5 - π0)`.
pub fn target_minority_share(original_share: f64, gamma: f64) -> f64 {
    original_share + gamma * (0.5 - original_share)
}

/// Row indices of the rebalanced dataset.
///
/// Oversampling returns every row once, in order, followed by minority rows
/// drawn with replacement. Undersampling returns every minority row and a
/// without-replacement draw of majority rows, in original row order.
pub fn resample_indices(labels: &[f64], cfg: &SamplingConfig) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&cfg.gamma) {
        return Err(Error::InvalidParameter(format!(
            "sampling frequency must lie in [0, 1], got {}",
            cfg.gamma
        )));
    }
    crate::data::check_binary_labels(labels)?;
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1.0).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0.0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateLabels(format!(
            "resampling needs both classes, got {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    let all: Vec<usize> = (0..labels.len()).collect();
    if cfg.scheme == SamplingScheme::Original || cfg.gamma == 0.0 {
        return Ok(all);
    }
    let (minority, majority) = if pos.len() < neg.len() {
        (pos, neg)
    } else {
        (neg, pos)
    };
    let n = labels.len() as f64;
    let n_min = minority.len() as f64;
    let target = target_minority_share(n_min / n, cfg.gamma);
    let mut rng = seed::rng(cfg.seed);

    match cfg.scheme {
        SamplingScheme::OversampleMinority => {
            // (n_min + m) / (n + m) = target
            let extra = round_half_up((target * n - n_min) / (1.0 - target));
            let mut out = all;
            out.extend((0..extra).map(|_| minority[rng.random_range(0..minority.len())]));
            Ok(out)
        }
        SamplingScheme::UndersampleMajority => {
            // n_min / (n_min + q) = target
            let keep = round_half_up(n_min * (1.0 - target) / target).clamp(1, majority.len());
            let mut out: Vec<usize> = index::sample(&mut rng, majority.len(), keep)
                .into_iter()
                .map(|k| majority[k])
                .chain(minority.iter().copied())
                .collect();
            out.sort_unstable();
            Ok(out)
        }
        SamplingScheme::Original => unreachable!(),
    }
}

/// Rebalanced copy of `ds`; feature values are never altered.
pub fn resample(ds: &EncodedDataset, cfg: &SamplingConfig) -> Result<EncodedDataset> {
    let rows = resample_indices(&ds.y, cfg)?;
    Ok(ds.subset(&rows))
}

pub const DEFAULT_SWEEP_LAMBDAS: [f64; 4] = [1e-4, 0.1, 1.0, 100.0];
pub const DEFAULT_SWEEP_GAMMAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub schemes: Vec<SamplingScheme>,
    pub test_fraction: f64,
    pub seed: u64,
    pub standardize: bool,
    /// Template for the logistic fits; `lambda` is set per cell.
    pub fit: LogRegConfig,
}

impl SweepConfig {
    pub fn new(seed: u64) -> Self {
        SweepConfig {
            lambdas: DEFAULT_SWEEP_LAMBDAS.to_vec(),
            gammas: DEFAULT_SWEEP_GAMMAS.to_vec(),
            schemes: SamplingScheme::ALL.to_vec(),
            test_fraction: crate::encode::DEFAULT_TEST_FRACTION,
            seed,
            standardize: true,
            fit: LogRegConfig::new(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub gamma: f64,
    pub scheme: SamplingScheme,
    pub auc: f64,
}

/// Out-of-sample AUC for every (lambda, gamma, scheme) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSweepReport {
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub test_fraction: f64,
}

impl SamplingSweepReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lambda,gamma,scheme,auc")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(r.lambda),
                fmt_f64(r.gamma),
                r.scheme,
                fmt_f64(r.auc)
            )?;
        }
        Ok(())
    }

    /// AUC series over gamma for one (lambda, scheme) pair.
    pub fn series(&self, lambda: f64, scheme: SamplingScheme) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.lambda == lambda && r.scheme == scheme)
            .map(|r| (r.gamma, r.auc))
            .collect()
    }
}

/// Splits once, then for every cell resamples the training part, fits the
/// L1 logistic model and scores it on the untouched test part. Cells run
/// in parallel; rows come out in (lambda, gamma, scheme) order.
pub fn sweep(ds: &EncodedDataset, cfg: &SweepConfig) -> Result<SamplingSweepReport> {
    if cfg.lambdas.is_empty() || cfg.gammas.is_empty() || cfg.schemes.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one lambda, gamma and scheme".into(),
        ));
    }
    if let Some(g) = cfg.gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::InvalidParameter(format!("gamma {g} outside [0, 1]")));
    }
    if let Some(l) = cfg.lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter(format!("invalid lambda {l}")));
    }
    ds.check_binary()?;
    let parts = split(ds, cfg.test_fraction, cfg.seed)?;
    let train = ds.subset(&parts.train_rows);
    let test = ds.subset(&parts.test_rows);

    let mut cells = Vec::new();
    for (li, &lambda) in cfg.lambdas.iter().enumerate() {
        for (gi, &gamma) in cfg.gammas.iter().enumerate() {
            for &scheme in &cfg.schemes {
                cells.push((li, lambda, gi, gamma, scheme));
            }
        }
    }
    let rows = cells
        .into_par_iter()
        .map(|(li, lambda, gi, gamma, scheme)| {
            let cell = || -> Result<SweepRow> {
                let cell_seed = seed::derive(cfg.seed, &[li as u64, gi as u64, scheme.tag()]);
                let sampled = resample(&train, &SamplingConfig::new(scheme, gamma, cell_seed))?;
                let fit_cfg = LogRegConfig {
                    lambda,
                    ..cfg.fit.clone()
                };
                let model = fit_with(&sampled, &fit_cfg, cfg.standardize)?;
                let scores = model.decision_function(&test.x)?;
                Ok(SweepRow {
                    lambda,
                    gamma,
                    scheme,
                    auc: auc(&test.y, &scores)?,
                })
            };
            cell().context_with(|| format!("lambda={lambda}, gamma={gamma}, scheme={scheme}"))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SamplingSweepReport {
        rows,
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;
    use proptest::prelude::*;

    fn imbalanced(pos: usize, neg: usize) -> EncodedDataset {
        let n = pos + neg;
        let x = Matrix::from_columns(n, &[(0..n).map(|i| i as f64).collect::<Vec<_>>()]).unwrap();
        let y = (0..n).map(|i| if i < pos { 1.0 } else { 0.0 }).collect();
        EncodedDataset::from_parts(x, y).unwrap()
    }

    #[test]
    fn oversample_to_balance() {
        let ds = imbalanced(190, 10);
        let out = resample(
            &ds,
            &SamplingConfig::new(SamplingScheme::OversampleMinority, 1.0, 4),
        )
        .unwrap();
        assert_eq!(out.class_counts(), (190, 190));
        // every original row still present, in order, at the front
        assert_eq!(out.x.column(0)[..200], ds.x.column(0)[..]);
    }

    #[test]
    fn undersample_to_balance() {
        let ds = imbalanced(190, 10);
        let out = resample(
            &ds,
            &SamplingConfig::new(SamplingScheme::UndersampleMajority, 1.0, 4),
        )
        .unwrap();
        assert_eq!(out.class_counts(), (10, 10));
        for i in 190..200 {
            let id = i.to_string();
            assert_eq!(out.row_ids.iter().filter(|r| **r == id).count(), 1);
        }
    }

    #[test]
    fn gamma_zero_is_identity() {
        let ds = imbalanced(30, 7);
        for scheme in SamplingScheme::ALL {
            assert_eq!(
                resample(&ds, &SamplingConfig::new(scheme, 0.0, 1)).unwrap(),
                ds
            );
        }
        assert_eq!(
            resample(&ds, &SamplingConfig::new(SamplingScheme::Original, 1.0, 1)).unwrap(),
            ds
        );
    }

    #[test]
    fn intermediate_gamma_hits_interpolated_share() {
        let ds = imbalanced(180, 20);
        // target share 0.1 + 0.5 * 0.4 = 0.3
        let over = resample(
            &ds,
            &SamplingConfig::new(SamplingScheme::OversampleMinority, 0.5, 2),
        )
        .unwrap();
        // (20 + m) / (200 + m) = 0.3 -> m = 40/0.7 = 57.14 -> 57
        assert_eq!(over.class_counts(), (77, 180));
        let under = resample(
            &ds,
            &SamplingConfig::new(SamplingScheme::UndersampleMajority, 0.5, 2),
        )
        .unwrap();
        // 20 / (20 + q) = 0.3 -> q = 46.67 -> 47
        assert_eq!(under.class_counts(), (20, 47));
    }

    #[test]
    fn resample_errors() {
        let one = imbalanced(5, 0);
        assert!(resample(
            &one,
            &SamplingConfig::new(SamplingScheme::OversampleMinority, 1.0, 0)
        )
        .is_err());
        let ds = imbalanced(5, 2);
        assert!(resample(
            &ds,
            &SamplingConfig::new(SamplingScheme::OversampleMinority, 1.5, 0)
        )
        .is_err());
    }

    #[test]
    fn sweep_rejects_empty_grids() {
        let ds = imbalanced(30, 10);
        let mut cfg = SweepConfig::new(1);
        cfg.gammas.clear();
        assert!(sweep(&ds, &cfg).is_err());
    }

    proptest! {
        #[test]
        fn resample_properties(
            pos in 1usize..60,
            neg in 1usize..60,
            gamma in 0.0f64..=1.0,
            over in any::<bool>(),
            seed in any::<u64>(),
        ) {
            let ds = imbalanced(pos, neg);
            let scheme = if over { SamplingScheme::OversampleMinority } else { SamplingScheme::UndersampleMajority };
            let cfg = SamplingConfig::new(scheme, gamma, seed);
            let rows = resample_indices(&ds.y, &cfg).unwrap();
            prop_assert_eq!(&rows, &resample_indices(&ds.y, &cfg).unwrap());
            let mut counts = vec![0usize; pos + neg];
            for &r in &rows { counts[r] += 1; }
            if over {
                prop_assert!(counts.iter().all(|&c| c >= 1));
            } else {
                prop_assert!(counts.iter().all(|&c| c <= 1));
            }
            if gamma == 1.0 {
                let p = rows.iter().filter(|&&r| ds.y[r] == 1.0).count();
                let n = rows.len() - p;
                prop_assert!(p.abs_diff(n) <= 1);
            }
            let out = resample(&ds, &cfg).unwrap();
            for (i, &r) in rows.iter().enumerate() {
                prop_assert_eq!(out.x.get(i, 0), ds.x.get(r, 0));
            }
        }
    }
}
