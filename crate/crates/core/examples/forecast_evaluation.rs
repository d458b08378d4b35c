//! Recursive and rolling one-step-ahead forecasts from GARCH and realized
//! EGARCH, scored against the true simulated variance.
//!
//! ```text
//! cargo run --release --example forecast_evaluation
//! ```

use regarch::estimation::ModelSpec;
use regarch::forecast::{evaluate, forecast, ForecastOptions, ForecastScheme};
use regarch::series::AlignedDataset;
use regarch::simulation::{simulate_model, Dgp, SimConfig};

fn main() -> regarch::Result<()> {
    let dgp = Dgp::Regarch {
        omega: 0.477,
        beta: 0.924,
        tau1: -0.114,
        tau2: 0.062,
        gamma: vec![0.313],
        xi: vec![-1.228],
        phi: None,
        delta1: vec![-0.127],
        delta2: vec![0.098],
        sigma: vec![vec![0.232]],
        kinds: None,
    };
    let out = simulate_model(&SimConfig::new(5, 1000, dgp))?;
    let data = out.dataset()?;
    let truth = out.true_variance_series()?;
    let k = 800;
    // Refits after the first start from the previous optimum only.
    let options = ForecastOptions {
        refit_starts: Some(0),
        ..Default::default()
    };

    println!(
        "{:<12} {:<10} {:>9} {:>9} {:>10} {:>7}",
        "model", "scheme", "MSE", "QLIKE", "l_r,out", "failed"
    );
    for scheme in [ForecastScheme::Recursive, ForecastScheme::Rolling] {
        for (spec, d) in [
            (
                ModelSpec::garch(),
                AlignedDataset::returns_only(out.returns.clone()),
            ),
            (ModelSpec::regarch(1), data.clone()),
        ] {
            let fc = forecast(&spec, &d, k, scheme, &options)?;
            let loss = evaluate(&fc, &truth, &out.returns)?;
            println!(
                "{:<12} {:<10} {:>9.4} {:>9.4} {:>10.2} {:>7}",
                spec.name(),
                scheme.as_str(),
                loss.mse,
                loss.qlike,
                loss.loglik_out,
                fc.failed_origins().count()
            );
        }
    }
    Ok(())
}
