//! Realized variance, realized range and realized kernel from simulated
//! five-minute bars, plus the open-hours proxy scaled to close-to-close
//! variance.
//!
//! ```text
//! cargo run --release --example realized_measures
//! ```

use regarch::measures::{
    apply_proxy, measure_series, proxy_adjustment, realized_kernel, realized_range_volatility,
    realized_variance, RangeScaling,
};
use regarch::series::MeasureKind;
use regarch::simulation::{calibrate_lambda, simulate_intraday, Dgp, SimConfig};

fn main() -> regarch::Result<()> {
    let dgp = Dgp::HestonLike {
        mu: 0.0,
        v0: 1.5,
        kappa: 0.03,
        theta: 1.5,
        eta: 0.2,
        rho: -0.5,
    };
    let config = SimConfig::new(42, 250, dgp)
        .with_grid(78, 10)
        .with_noise(2e-5);
    let out = simulate_intraday(&config)?;
    let grids = out.grids.as_ref().expect("intraday output has grids");
    let iv = out.iv.as_ref().expect("intraday output has IV");

    // Ten price observations per bar: the range needs λ₂,₁₀, not 4 ln 2.
    let (lambda, _) = calibrate_lambda(Some(10), 100_000, 1)?;
    let scaling = RangeScaling::new(lambda, Some(10))?;
    let rv = measure_series(grids, MeasureKind::Rv, realized_variance)?;
    let rrv = measure_series(grids, MeasureKind::Rrv, |g| {
        realized_range_volatility(g, &scaling)
    })?;
    let rk = measure_series(grids, MeasureKind::Rk, realized_kernel)?;
    let proxy = apply_proxy(&rk, &proxy_adjustment(&out.returns, &rk)?);

    println!("lambda_2,m used for the range: {:.4}", scaling.lambda2m());
    println!(
        "{:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "day", "IV", "RV", "RRV", "RK", "proxy"
    );
    for d in 0..8 {
        println!(
            "{:>8} {:8.4} {:8.4} {:8.4} {:8.4} {:8.4}",
            rv.dates()[d],
            iv[d],
            rv.values()[d],
            rrv.values()[d],
            rk.values()[d],
            proxy.values()[d]
        );
    }

    let mae = |x: &[f64]| {
        x.iter()
            .zip(iv)
            .map(|(a, b)| (a - b).abs() / b)
            .sum::<f64>()
            / x.len() as f64
    };
    println!();
    println!("mean absolute relative error against IV");
    println!("  RV  {:.4}", mae(rv.values()));
    println!("  RRV {:.4}", mae(rrv.values()));
    println!("  RK  {:.4}", mae(rk.values()));
    Ok(())
}
