use regarch::measures::{measure_series, realized_variance};
use regarch::series::MeasureKind;
use regarch::simulation::{calibrate_lambda, simulate, Dgp, SimConfig};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn rv_and_iv(config: &SimConfig) -> (Vec<f64>, Vec<f64>) {
    let out = simulate(config).unwrap();
    let grids = out.grids.as_ref().unwrap();
    let rv = measure_series(grids, MeasureKind::Rv, realized_variance).unwrap();
    (rv.values().to_vec(), out.iv.unwrap())
}

#[test]
fn garch_sample_variance_matches_unconditional() {
    let out = simulate(&SimConfig::new(
        5,
        1_000_000,
        Dgp::Garch {
            omega: 0.05,
            alpha: 0.05,
            beta: 0.90,
        },
    ))
    .unwrap();
    let r = out.returns.values();
    let v = r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64;
    assert!((v - 1.0).abs() < 0.02, "sample variance {v}");
}

#[test]
fn same_seed_same_sample() {
    let cfg = SimConfig::new(
        9,
        50,
        Dgp::HestonLike {
            mu: 0.0,
            v0: 1.0,
            kappa: 5.0,
            theta: 1.0,
            eta: 0.3,
            rho: -0.5,
        },
    )
    .with_grid(20, 3);
    let a = simulate(&cfg).unwrap();
    let b = simulate(&cfg).unwrap();
    assert_eq!(a.returns, b.returns);
    assert_eq!(a.grids, b.grids);
    let c = simulate(&SimConfig { seed: 10, ..cfg }).unwrap();
    assert_ne!(a.returns, c.returns);
}

#[test]
fn realized_variance_is_unbiased_for_integrated_variance() {
    let cfg = SimConfig::new(
        21,
        1000,
        Dgp::Brownian {
            mu: 0.0,
            sigma: 1.0,
        },
    )
    .with_grid(78, 5);
    let (rv, iv) = rv_and_iv(&cfg);
    assert!(iv.iter().all(|v| (v - 1.0).abs() < 1e-12));
    // sd(RV) ≈ sqrt(2/78) per day, so the mean over 1000 days has sd ≈ 0.005.
    assert!((mean(&rv) - 1.0).abs() < 0.025, "mean RV {}", mean(&rv));
}

#[test]
fn microstructure_noise_biases_realized_variance_upward() {
    let base = SimConfig::new(
        22,
        300,
        Dgp::Brownian {
            mu: 0.0,
            sigma: 1.0,
        },
    )
    .with_grid(78, 1);
    let (clean, _) = rv_and_iv(&base);
    let (noisy, _) = rv_and_iv(&base.clone().with_noise(5e-4));
    // 2n noise variances, in percent²: 2 · 78 · 2.5e-7 · 1e4 = 0.39.
    let bias = mean(&noisy) - mean(&clean);
    assert!((bias - 0.39).abs() < 0.1, "bias {bias}");
}

#[test]
fn range_constant_increases_with_monitoring_frequency() {
    let mut prev = 0.0;
    for m in [Some(1), Some(4), Some(32), None] {
        let (lambda, se) = calibrate_lambda(m, 20_000, 3).unwrap();
        assert!(
            lambda > prev + 2.0 * se,
            "lambda at {m:?} = {lambda}, previous {prev}"
        );
        prev = lambda;
    }
    assert!((prev - 4.0 * std::f64::consts::LN_2).abs() < 0.05);
}

#[test]
fn realized_variance_error_shrinks_with_sampling_frequency() {
    let mut prev = f64::INFINITY;
    for n in [13, 78, 390] {
        let cfg = SimConfig::new(
            23,
            300,
            Dgp::Brownian {
                mu: 0.0,
                sigma: 1.0,
            },
        )
        .with_grid(n, 1);
        let (rv, iv) = rv_and_iv(&cfg);
        let mae = rv.iter().zip(&iv).map(|(a, b)| (a - b).abs()).sum::<f64>() / rv.len() as f64;
        assert!(mae < prev, "MAE {mae} at n = {n}, previous {prev}");
        prev = mae;
    }
}

#[test]
fn regarch_simulation_emits_one_series_per_measure() {
    let dgp = Dgp::Regarch {
        omega: 0.4,
        beta: 0.9,
        tau1: -0.1,
        tau2: 0.05,
        gamma: vec![0.2, 0.1],
        xi: vec![-0.5, -0.3],
        phi: None,
        delta1: vec![-0.1, -0.05],
        delta2: vec![0.05, 0.05],
        sigma: vec![vec![0.2, 0.1], vec![0.1, 0.15]],
        kinds: None,
    };
    let out = simulate(&SimConfig::new(4, 200, dgp)).unwrap();
    assert_eq!(out.measures.len(), 2);
    assert_eq!(out.measures[0].kind(), MeasureKind::Rv);
    assert_eq!(out.measures[1].kind(), MeasureKind::Rrv);
    assert_eq!(out.true_h.len(), 200);
    assert!(out.dataset().is_ok());
}

#[test]
fn invalid_configs_are_rejected() {
    let dgp = Dgp::Brownian {
        mu: 0.0,
        sigma: 1.0,
    };
    assert!(simulate(&SimConfig::new(1, 0, dgp.clone())).is_err());
    assert!(simulate(&SimConfig::new(1, 10, dgp.clone()).with_noise(-1.0)).is_err());
    assert!(calibrate_lambda(Some(5), 10, 1).is_err());
}
