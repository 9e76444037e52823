// Turn a raw CSV into a numeric design matrix: numeric columns pass
// through, categorical columns become indicators for their most frequent
// values, blanks become their own `<NA>` category.

use std::path::PathBuf;

use sparsefit::encode::{build_vocabulary, encode, standardize, RawTable, Schema};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let table = RawTable::from_path(dir.join("cases.csv"))?;
    let schema = Schema::load(dir.join("model1_schema.json"))?;

    // Keep only the three most frequent values of each categorical column.
    let vocab = build_vocabulary(&table, &schema, 3)?;
    let ds = encode(&table, &vocab)?;
    println!("{} rows -> {} features", ds.n_rows(), ds.n_features());
    for name in &ds.feature_names {
        println!("  {name}");
    }
    println!("first row: {:?} -> wage {}", ds.x.row(0), ds.y[0]);

    // The vocabulary is data: save it to encode new rows identically later.
    let json = vocab.to_json()?;
    let again = encode(
        &table,
        &sparsefit::encode::FeatureVocabulary::from_json(&json)?,
    )?;
    assert_eq!(again, ds);

    let (_, scaling) = standardize(&ds)?;
    println!("share of rows in the top sector: {:.3}", scaling.means[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("encode example failed");
}
