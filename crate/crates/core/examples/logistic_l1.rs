// L1-penalized logistic regression: sparsity against lambda, the exact
// null model above lambda_max, and the outer-loop objective history.

use sparsefit::logistic::{self, LogRegConfig};
use sparsefit::metrics::auc;
use sparsefit::synth::{generate_synthetic, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic(&SynthSpec::logistic(1000, 15, 3, 0.3), 7)?;
    let ds = &data.dataset;
    println!("true support: {:?}", data.support());

    let lmax = logistic::lambda_max(ds)?;
    for lambda in [2.0 * lmax, lmax / 2.0, lmax / 10.0, lmax / 100.0] {
        let fit = logistic::fit_traced(ds, &LogRegConfig::new(lambda), None)?;
        let m = &fit.model;
        let scores = m.decision_function(&ds.x)?;
        println!(
            "lambda {lambda:.4}  nonzero {:>2}  outer iterations {:>2}  training AUC {:.4}  penalized log-lik {:.5}",
            m.n_nonzero(),
            m.n_outer_iterations,
            auc(&ds.y, &scores)?,
            fit.objective_trace.last().copied().unwrap_or(f64::NAN)
        );
    }

    // At or above lambda_max the intercept is the log-odds of the base rate.
    let null = logistic::fit(ds, &LogRegConfig::new(lmax))?;
    let rate = ds.y.iter().sum::<f64>() / ds.n_rows() as f64;
    println!(
        "null intercept {:.6} = logit({rate:.3}) = {:.6}",
        null.intercept,
        (rate / (1.0 - rate)).ln()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("logistic example failed");
}
