//! ROC and precision-recall curves for binary scores.
//!
//! AUC is computed from midranks (the Mann-Whitney statistic, ties count
//! one half). The trapezoidal area under the curve points is kept as an
//! independent cross-check.

use std::cmp::Ordering;
use std::io::Write;

use crate::data::check_binary_labels;
use crate::error::{Error, Result};
use crate::report::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// Descending cutoffs; a row is called positive when `score >= threshold`.
    /// Starts at `+inf` and ends at `-inf`.
    pub thresholds: Vec<f64>,
    pub tpr: Vec<f64>,
    pub fpr: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal integral of TPR over FPR along the curve points.
    pub fn trapezoid_area(&self) -> f64 {
        trapezoid(&self.fpr, &self.tpr)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "threshold,fpr,tpr")?;
        for ((t, f), p) in self.thresholds.iter().zip(&self.fpr).zip(&self.tpr) {
            writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*f), fmt_f64(*p))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    /// Descending cutoffs, one per distinct score.
    pub thresholds: Vec<f64>,
    pub recall: Vec<f64>,
    pub precision: Vec<f64>,
    pub average_precision: f64,
}

impl PrCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "threshold,recall,precision")?;
        for ((t, r), p) in self
            .thresholds
            .iter()
            .zip(&self.recall)
            .zip(&self.precision)
        {
            writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*r), fmt_f64(*p))?;
        }
        Ok(())
    }
}

fn check_inputs(labels: &[f64], scores: &[f64]) -> Result<(usize, usize)> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} scores",
            labels.len(),
            scores.len()
        )));
    }
    check_binary_labels(labels)?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("scores contain NaN".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1.0).count();
    Ok((pos, labels.len() - pos))
}

fn require_both(pos: usize, neg: usize) -> Result<()> {
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels(format!(
            "need both classes, got {pos} positive and {neg} negative"
        )));
    }
    Ok(())
}

/// Cumulative (tp, fp) counts after each group of tied scores, scanning
/// from the highest score down.
fn tied_groups(labels: &[f64], scores: &[f64]) -> Vec<(f64, usize, usize)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    let mut groups = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        groups.push((s, tp, fp));
    }
    groups
}

/// Tie-aware rank AUC: `(U_pos) / (n_pos · n_neg)` with midranks.
pub fn auc(labels: &[f64], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = check_inputs(labels, scores)?;
    require_both(pos, neg)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    // Ranks are doubled so every midrank is an integer.
    let mut rank_sum_x2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j share midrank (i+1+j)/2
        let midrank_x2 = (i + 1 + j) as u128;
        let pos_in_group = order[i..j].iter().filter(|&&k| labels[k] == 1.0).count() as u128;
        rank_sum_x2 += midrank_x2 * pos_in_group;
        i = j;
    }
    let pos_u = pos as u128;
    // 2U = 2R - n_pos(n_pos + 1)
    let u_x2 = rank_sum_x2 - pos_u * (pos_u + 1);
    Ok(u_x2 as f64 / 2.0 / (pos as f64 * neg as f64))
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[0] + ys[1]) / 2.0)
        .sum()
}

/// ROC curve with one point per distinct score plus `±inf` sentinels.
pub fn roc(labels: &[f64], scores: &[f64]) -> Result<RocCurve> {
    let (pos, neg) = check_inputs(labels, scores)?;
    require_both(pos, neg)?;
    let groups = tied_groups(labels, scores);
    let mut thresholds = vec![f64::INFINITY];
    let mut tpr = vec![0.0];
    let mut fpr = vec![0.0];
    for (s, tp, fp) in groups {
        thresholds.push(s);
        tpr.push(tp as f64 / pos as f64);
        fpr.push(fp as f64 / neg as f64);
    }
    thresholds.push(f64::NEG_INFINITY);
    tpr.push(1.0);
    fpr.push(1.0);
    Ok(RocCurve {
        thresholds,
        tpr,
        fpr,
        auc: auc(labels, scores)?,
    })
}

/// Precision-recall curve with one point per distinct score; average
/// precision is `Σ (R_k - R_{k-1}) P_k` with `R_0 = 0`.
pub fn pr_curve(labels: &[f64], scores: &[f64]) -> Result<PrCurve> {
    let (pos, _) = check_inputs(labels, scores)?;
    if pos == 0 {
        return Err(Error::DegenerateLabels("no positive labels".into()));
    }
    let mut thresholds = Vec::new();
    let mut recall = Vec::new();
    let mut precision = Vec::new();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (s, tp, fp) in tied_groups(labels, scores) {
        let r = tp as f64 / pos as f64;
        let p = tp as f64 / (tp + fp) as f64;
        ap += (r - prev_recall) * p;
        prev_recall = r;
        thresholds.push(s);
        recall.push(r);
        precision.push(p);
    }
    Ok(PrCurve {
        thresholds,
        recall,
        precision,
        average_precision: ap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn auc_examples() {
        let s = [0.9, 0.8, 0.3, 0.2];
        assert_eq!(auc(&[1.0, 1.0, 0.0, 0.0], &s).unwrap(), 1.0);
        assert_eq!(auc(&[1.0, 0.0, 1.0, 0.0], &s).unwrap(), 0.75);
        assert_eq!(auc(&[1.0, 0.0, 1.0, 0.0], &[0.4; 4]).unwrap(), 0.5);
    }

    #[test]
    fn auc_errors() {
        assert!(matches!(
            auc(&[1.0, 1.0], &[0.1, 0.2]),
            Err(Error::DegenerateLabels(_))
        ));
        assert!(auc(&[1.0, 0.0], &[0.1]).is_err());
        assert!(auc(&[1.0, 2.0], &[0.1, 0.2]).is_err());
        assert!(auc(&[1.0, 0.0], &[f64::NAN, 0.2]).is_err());
    }

    #[test]
    fn roc_endpoints_and_area() {
        let c = roc(&[1.0, 0.0, 1.0, 0.0], &[0.9, 0.8, 0.3, 0.2]).unwrap();
        assert_eq!((c.fpr[0], c.tpr[0]), (0.0, 0.0));
        assert_eq!((*c.fpr.last().unwrap(), *c.tpr.last().unwrap()), (1.0, 1.0));
        assert_eq!(c.thresholds[0], f64::INFINITY);
        assert_eq!(*c.thresholds.last().unwrap(), f64::NEG_INFINITY);
        assert_eq!(c.auc, 0.75);
        assert!((c.trapezoid_area() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pr_examples() {
        let c = pr_curve(&[1.0, 1.0, 0.0, 0.0], &[0.9, 0.8, 0.3, 0.2]).unwrap();
        assert_eq!(c.average_precision, 1.0);

        let c = pr_curve(&[1.0, 0.0, 0.0, 0.0, 1.0], &[0.5; 5]).unwrap();
        assert_eq!(c.precision, vec![0.4]);

        let c = pr_curve(&[1.0, 0.0], &[0.2, 0.9]).unwrap();
        assert_eq!(c.recall, vec![0.0, 1.0]);
        assert_eq!(c.precision, vec![0.0, 0.5]);
        assert_eq!(c.average_precision, 0.5);

        assert!(pr_curve(&[0.0, 0.0], &[0.2, 0.9]).is_err());
    }

    proptest! {
        #[test]
        fn auc_rank_invariances(
            data in proptest::collection::vec((any::<bool>(), -20i32..20), 2..40),
        ) {
            let labels: Vec<f64> = data.iter().map(|(l, _)| if *l { 1.0 } else { 0.0 }).collect();
            prop_assume!(labels.contains(&1.0) && labels.contains(&0.0));
            let scores: Vec<f64> = data.iter().map(|(_, s)| *s as f64 / 4.0).collect();
            let a = auc(&labels, &scores).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            let exp: Vec<f64> = scores.iter().map(|s| (s * 0.7).exp() + 3.0).collect();
            prop_assert_eq!(auc(&labels, &exp).unwrap(), a);
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            prop_assert!((a + auc(&labels, &neg).unwrap() - 1.0).abs() <= 1e-15);
            let curve = roc(&labels, &scores).unwrap();
            prop_assert!((curve.trapezoid_area() - a).abs() <= 1e-12);
            for w in curve.tpr.windows(2) { prop_assert!(w[1] >= w[0]); }
            for w in curve.fpr.windows(2) { prop_assert!(w[1] >= w[0]); }
            let pr = pr_curve(&labels, &scores).unwrap();
            for w in pr.recall.windows(2) { prop_assert!(w[1] >= w[0]); }
            prop_assert!(pr.precision.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}
