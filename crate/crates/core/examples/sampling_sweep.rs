// How much should the minority class be rebalanced? Sweep the sampling
// frequency gamma (0 = original mix, 1 = balanced) for each penalty and
// sampling scheme, scoring every fit on the same untouched test split.

use sparsefit::resample::{sweep, SamplingScheme, SweepConfig};
use sparsefit::synth::{generate_synthetic, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic(&SynthSpec::logistic(1500, 12, 4, 0.08), 3)?;
    let cfg = SweepConfig::new(3);
    let report = sweep(&data.dataset, &cfg)?;
    for &lambda in &cfg.lambdas {
        println!("lambda {lambda:e}");
        for scheme in SamplingScheme::ALL {
            let series: Vec<String> = report
                .series(lambda, scheme)
                .iter()
                .map(|(g, a)| format!("{g:.2}:{a:.3}"))
                .collect();
            println!("  {:<22} {}", scheme.as_str(), series.join("  "));
        }
    }
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    println!("{} csv rows", String::from_utf8(csv)?.lines().count() - 1);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sampling sweep example failed");
}
