// Fit the LASSO along a penalty path on synthetic data and watch the
// support shrink as the penalty grows.

use sparsefit::lasso::{self, LassoConfig};
use sparsefit::synth::{generate_synthetic, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = generate_synthetic(&SynthSpec::linear(300, 20, 4, 0.5), 42)?;
    let ds = &data.dataset;
    println!("true support: {:?}", data.support());

    // Beyond alpha_max the solution is the intercept-only model.
    let amax = lasso::alpha_max(ds, None)?;
    let alphas: Vec<f64> = (0..6).map(|k| amax * 10f64.powi(-k)).collect();
    let path = lasso::fit_path(ds, &alphas, &LassoConfig::new(0.0), false)?;
    for (alpha, model) in alphas.iter().zip(&path) {
        let support: Vec<usize> = (0..model.coefficients.len())
            .filter(|&j| model.coefficients[j] != 0.0)
            .collect();
        println!(
            "alpha {alpha:>10.3e}  nonzero {:>2}  |beta|_1 {:>7.4}  support {support:?}",
            model.n_nonzero(),
            model.l1_norm()
        );
    }

    // A single fit also reports its optimality certificate.
    let fit = lasso::fit_warm(ds, &LassoConfig::new(0.05), None)?;
    println!(
        "alpha 0.05: {} sweeps, converged {}, kkt residual {:.2e}",
        fit.model.n_iterations, fit.model.converged, fit.kkt_residual
    );
    assert!(
        path[0].n_nonzero() == 0
            && path[0].intercept == ds.y.iter().sum::<f64>() / ds.n_rows() as f64
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("lasso path example failed");
}
