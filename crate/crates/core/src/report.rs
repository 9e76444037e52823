//! Signed feature importance and table formatting helpers.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{FittedModel, ModelKind};

pub const DEFAULT_TOP_N: usize = 20;

/// Formats a double with 17 significant digits, enough to round-trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_owned()
    } else if v > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFeature {
    pub feature: String,
    pub coefficient: f64,
}

/// The most positive and most negative coefficients of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    /// Largest coefficients first.
    pub positive: Vec<WeightedFeature>,
    /// Most negative coefficients first.
    pub negative: Vec<WeightedFeature>,
    pub model_kind: ModelKind,
    pub hyperparameter: f64,
}

impl ImportanceReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "sign,rank,feature,coefficient")?;
        for (sign, list) in [("positive", &self.positive), ("negative", &self.negative)] {
            for (rank, f) in list.iter().enumerate() {
                let mut row = csv::Writer::from_writer(Vec::new());
                row.write_record([
                    sign,
                    &(rank + 1).to_string(),
                    &f.feature,
                    &fmt_f64(f.coefficient),
                ])?;
                out.write_all(&row.into_inner().map_err(|e| e.into_error())?)?;
            }
        }
        Ok(())
    }
}

/// Ranks nonzero coefficients by sign; ties in magnitude keep feature order.
pub fn importance(model: &FittedModel, top_n: usize) -> ImportanceReport {
    let pairs: Vec<(usize, f64)> = model.coefficients().iter().copied().enumerate().collect();
    let named = |(j, b): (usize, f64)| WeightedFeature {
        feature: model.feature_names()[j].clone(),
        coefficient: b,
    };

    let mut positive: Vec<(usize, f64)> = pairs.iter().copied().filter(|(_, b)| *b > 0.0).collect();
    positive.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    positive.truncate(top_n);

    let mut negative: Vec<(usize, f64)> = pairs.iter().copied().filter(|(_, b)| *b < 0.0).collect();
    negative.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    negative.truncate(top_n);

    ImportanceReport {
        positive: positive.into_iter().map(named).collect(),
        negative: negative.into_iter().map(named).collect(),
        model_kind: model.kind(),
        hyperparameter: model.hyperparameter(),
    }
}
