//! Monte Carlo calibration of the range constant λ₂,ₘ and the relative
//! precision of realized range against realized variance.
//!
//! ```text
//! cargo run --release --example range_efficiency
//! ```

use regarch::measures::LAMBDA2_CONTINUOUS;
use regarch::simulation::{calibrate_lambda, efficiency_report, Dgp, SimConfig};

fn main() -> regarch::Result<()> {
    println!("{:>8} {:>10} {:>10}", "m", "lambda2m", "MC s.e.");
    for m in [1, 2, 5, 10, 20, 50] {
        let (l, se) = calibrate_lambda(Some(m), 100_000, 7)?;
        println!("{m:>8} {l:>10.4} {se:>10.4}");
    }
    let (l, se) = calibrate_lambda(None, 100_000, 7)?;
    println!(
        "{:>8} {l:>10.4} {se:>10.4}   (4 ln 2 = {LAMBDA2_CONTINUOUS:.4})",
        "inf"
    );

    println!();
    println!(
        "{:>4} {:>10} {:>10} {:>8} {:>10} {:>12}",
        "m", "Var(RV)", "Var(RRV)", "ratio", "Lambda", "nVar(RV)/2IQ"
    );
    for m in [1, 10, 50] {
        let config = SimConfig::new(
            3,
            4000,
            Dgp::Brownian {
                mu: 0.0,
                sigma: 1.0,
            },
        )
        .with_grid(78, m);
        let r = efficiency_report(&config)?;
        println!(
            "{m:>4} {:>10.5} {:>10.5} {:>8.3} {:>10.4} {:>12.4}",
            r.var_rv, r.var_rrv, r.ratio, r.lambda_hat, r.rv_ratio
        );
    }
    Ok(())
}
