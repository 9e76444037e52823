// Wage regression on the two sample feature sets: encode the CSV, choose
// alpha by 10-fold cross-validation on a training split, and report
// in-sample and out-of-sample R².

use std::path::PathBuf;

use sparsefit::encode::{build_vocabulary, encode, standardize, RawTable, Schema, DEFAULT_TOP_K};
use sparsefit::lasso::alpha_max;
use sparsefit::pipeline::run_lasso;
use sparsefit::{CvOptions, LassoConfig};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data")
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Model 1 uses every year but only the older columns; Model 2 uses the
    // richer columns that exist from 2015 on.
    let models = [
        ("model 1", "cases.csv", "model1_schema.json"),
        ("model 2", "cases_2015_2018.csv", "model2_schema.json"),
    ];
    for (label, csv, schema) in models {
        let table = RawTable::from_path(data_dir().join(csv))?;
        let schema = Schema::load(data_dir().join(schema))?;
        let vocab = build_vocabulary(&table, &schema, DEFAULT_TOP_K)?;
        let ds = encode(&table, &vocab)?;

        // Wages are in dollars, so alpha lives on that scale too: span the
        // grid down from the smallest penalty that zeroes every coefficient.
        let top = alpha_max(&standardize(&ds)?.0, None)?;
        let grid: Vec<f64> = (0..10).map(|k| top * 10f64.powf(-0.5 * k as f64)).collect();
        let run = run_lasso(
            &ds,
            &grid,
            &CvOptions::new(2018),
            0.2,
            &LassoConfig::new(0.0),
        )?;
        let e = &run.evaluation;
        println!(
            "{label}: {} rows, {} features, alpha {:.3e}, {} nonzero, R2 in-sample {:.3}, out-of-sample {:.3}",
            ds.n_rows(),
            ds.n_features(),
            e.selected_alpha,
            e.n_nonzero,
            e.r2_in_sample,
            e.r2_out_of_sample
        );
        for (alpha, (mse, se)) in run
            .cv
            .grid
            .iter()
            .zip(run.cv.mean_score.iter().zip(&run.cv.std_error))
        {
            println!("    alpha {alpha:>10.3e}  cv mse {mse:>14.1}  se {se:>12.1}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("wage regression example failed");
}
