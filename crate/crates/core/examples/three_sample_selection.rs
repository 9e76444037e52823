// Imbalanced classification of case outcomes: lambda is chosen by
// stratified CV where every fold averages the held-out AUC of models fit on
// an oversampled, an undersampled and the original training sample. The
// selected lambda is then refit on each sample and scored on a test split.

use std::path::PathBuf;

use sparsefit::encode::{build_vocabulary, encode, RawTable, Schema, DEFAULT_TOP_K};
use sparsefit::pipeline::run_logreg;
use sparsefit::select::default_lambda_grid;
use sparsefit::{CvOptions, LogRegConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let table = RawTable::from_path(dir.join("cases.csv"))?;
    let schema = Schema::load(dir.join("status_schema.json"))?;
    let ds = encode(&table, &build_vocabulary(&table, &schema, DEFAULT_TOP_K)?)?;
    let (neg, pos) = ds.class_counts();
    println!("{} cases: {pos} certified, {neg} denied", ds.n_rows());

    let opts = CvOptions::new(11).with_folds(5);
    let run = run_logreg(
        &ds,
        &default_lambda_grid(),
        &opts,
        0.2,
        &LogRegConfig::new(0.0),
    )?;
    for (lambda, score) in run.cv.grid.iter().zip(&run.cv.mean_score) {
        println!("lambda {lambda:>7.0e}  mean CV AUC over three samples {score:.4}");
    }
    println!("selected lambda {}", run.cv.selected);
    for s in &run.schemes {
        println!(
            "  {:<22} test AUC {:.4}  average precision {:.4}  nonzero {}",
            s.scheme.as_str(),
            s.test_auc,
            s.pr.average_precision,
            s.model.n_nonzero()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("three-sample selection example failed");
}
