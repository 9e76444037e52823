// Ranking metrics: tie-aware AUC, the ROC curve and the precision-recall
// curve with average precision.

use sparsefit::metrics::{auc, pr_curve, roc};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0];
    let scores = [0.9, 0.8, 0.8, 0.6, 0.4, 0.3, 0.3, 0.1];

    // Ties between a positive and a negative count half.
    let a = auc(&labels, &scores)?;
    println!("AUC {a}");

    let curve = roc(&labels, &scores)?;
    println!("threshold      fpr    tpr");
    for ((t, f), p) in curve.thresholds.iter().zip(&curve.fpr).zip(&curve.tpr) {
        println!("{t:>9}  {f:>6.3}  {p:>5.3}");
    }
    assert!((curve.trapezoid_area() - a).abs() < 1e-12);

    let pr = pr_curve(&labels, &scores)?;
    println!("average precision {:.4}", pr.average_precision);
    let mut out = Vec::new();
    pr.write_csv(&mut out)?;
    print!("{}", String::from_utf8(out)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("ranking metrics example failed");
}
