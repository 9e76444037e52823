// Which features push wages up or down? Fit the richer wage model, save
// it, reload it and rank the signed coefficients.

use std::path::PathBuf;

use sparsefit::encode::{build_vocabulary, encode, RawTable, Schema, DEFAULT_TOP_K};
use sparsefit::lasso;
use sparsefit::report::importance;
use sparsefit::select::{cv_lasso, default_alpha_grid};
use sparsefit::{CvOptions, FittedModel, LassoConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let table = RawTable::from_path(dir.join("cases_2015_2018.csv"))?;
    let schema = Schema::load(dir.join("model2_schema.json"))?;
    let ds = encode(&table, &build_vocabulary(&table, &schema, DEFAULT_TOP_K)?)?;

    let cv = cv_lasso(
        &ds,
        &default_alpha_grid(),
        &CvOptions::new(5),
        &LassoConfig::new(0.0),
    )?;
    let model: FittedModel = lasso::fit_standardized(&ds, &LassoConfig::new(cv.selected))?.into();

    // Models round-trip through JSON without losing a bit.
    let reloaded = FittedModel::from_json(&model.to_json()?)?;
    assert_eq!(reloaded, model);

    let report = importance(&reloaded, 5);
    println!("alpha {:e}", report.hyperparameter);
    println!("raises wage:");
    for f in &report.positive {
        println!("  {:<40} {:>+10.1}", f.feature, f.coefficient);
    }
    println!("lowers wage:");
    for f in &report.negative {
        println!("  {:<40} {:>+10.1}", f.feature, f.coefficient);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("feature importance example failed");
}
