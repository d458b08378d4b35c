//! Fits GARCH, GJR, EGARCH and realized EGARCH (one and two measures) to a
//! simulated sample and prints parameters with sandwich standard errors,
//! log-likelihoods and information criteria.
//!
//! ```text
//! cargo run --release --example fit_models
//! ```

use regarch::estimation::{fit, FitOptions, FitResult, ModelSpec};
use regarch::series::AlignedDataset;
use regarch::simulation::{simulate_model, Dgp, SimConfig};

fn report(res: &FitResult) {
    println!("{}", res.spec.name());
    let se = res.std_errors.clone().unwrap_or_default();
    for (i, (name, value)) in res
        .std_error_names()
        .iter()
        .zip(res.full_natural())
        .enumerate()
    {
        match se.get(i) {
            Some(s) => println!("  {name:<10} {value:>9.4} ({s:.4})"),
            None => println!("  {name:<10} {value:>9.4}"),
        }
    }
    println!(
        "  l = {:.2}  l_r = {:.2}  AIC = {:.2}  SBIC = {:.2}  n = {}",
        res.loglik_joint, res.loglik_return, res.aic, res.sbic, res.n_params
    );
}

fn main() -> regarch::Result<()> {
    let dgp = Dgp::Regarch {
        omega: 0.477,
        beta: 0.927,
        tau1: -0.116,
        tau2: 0.058,
        gamma: vec![-0.082, 0.453],
        xi: vec![-1.229, -3.079],
        phi: None,
        delta1: vec![-0.126, -0.120],
        delta2: vec![0.102, 0.088],
        sigma: vec![vec![0.232, 0.193], vec![0.193, 0.183]],
        kinds: None,
    };
    let out = simulate_model(&SimConfig::new(11, 1848, dgp))?;
    let data = out.dataset()?;
    let returns_only = AlignedDataset::returns_only(out.returns.clone());
    let options = FitOptions::default();

    let garch = fit(&ModelSpec::garch(), &returns_only, &options)?;
    report(&garch);
    // Starting GJR at the GARCH optimum guarantees the nested ordering.
    let mut gjr_start = garch.natural.clone();
    gjr_start.push(1e-12);
    let gjr = fit(
        &ModelSpec::gjr(),
        &returns_only,
        &FitOptions {
            extra_starts: vec![gjr_start],
            ..options.clone()
        },
    )?;
    report(&gjr);
    report(&fit(&ModelSpec::egarch(), &returns_only, &options)?);
    for (label, which) in [("RV", vec![0]), ("RRV", vec![1]), ("both", vec![0, 1])] {
        println!("-- measures: {label}");
        let sub = data.select_measures(&which)?;
        report(&fit(&ModelSpec::regarch(which.len()), &sub, &options)?);
    }
    Ok(())
}
