use regarch::estimation::{fit, FitOptions, ModelParams, ModelSpec};
use regarch::forecast::{
    evaluate, forecast, forecast_recursive, forecast_rolling, mse_values, qlike, qlike_values,
    ForecastOptions, ForecastScheme, ForecastSeries,
};
use regarch::models::{regarch_reduced_recursion, GarchParams, RegarchParams};
use regarch::series::{
    AlignedDataset, DailyReturnSeries, Date, MeasureKind, RealizedMeasureSeries,
};
use regarch::simulation::{simulate, Dgp, SimConfig};
use regarch::Error;

fn rv_dgp() -> Dgp {
    Dgp::Regarch {
        omega: 0.477,
        beta: 0.924,
        tau1: -0.114,
        tau2: 0.062,
        gamma: vec![0.307],
        xi: vec![-1.228],
        phi: None,
        delta1: vec![-0.124],
        delta2: vec![0.100],
        sigma: vec![vec![0.233]],
        kinds: None,
    }
}

fn quick() -> ForecastOptions {
    ForecastOptions {
        refit_starts: Some(0),
        ..Default::default()
    }
}

#[test]
fn last_possible_origin_gives_one_forecast() {
    let out = simulate(&SimConfig::new(1, 300, rv_dgp())).unwrap();
    let data = out.dataset().unwrap();
    let spec = ModelSpec::regarch(1);
    let fc = forecast_recursive(&spec, &data, 299, &ForecastOptions::default()).unwrap();
    assert_eq!(fc.len(), 1);
    assert_eq!(&fc.dates()[0], data.dates().last().unwrap());

    // Same as fitting the first 299 days by hand and stepping once.
    let window = data.window(0, 299);
    let f = fit(
        &spec,
        &window,
        &FitOptions {
            compute_std_errors: false,
            ..Default::default()
        },
    )
    .unwrap();
    let h = f.params.forecast_next(&window, None).unwrap();
    assert!((fc.h_hat()[0] - h).abs() <= 1e-12 * h);

    assert!(matches!(
        forecast_recursive(&spec, &data, 300, &ForecastOptions::default()),
        Err(Error::InsufficientData { .. })
    ));
}

#[test]
fn schemes_use_the_documented_windows() {
    assert_eq!(ForecastScheme::Recursive.window(100, 1), (0, 100));
    assert_eq!(ForecastScheme::Recursive.window(100, 5), (0, 104));
    assert_eq!(ForecastScheme::Rolling.window(100, 1), (0, 100));
    assert_eq!(ForecastScheme::Rolling.window(100, 5), (4, 104));
    assert_eq!(
        "rolling".parse::<ForecastScheme>().unwrap(),
        ForecastScheme::Rolling
    );
    assert!("Rolling".parse::<ForecastScheme>().is_err());
}

#[test]
fn no_feedback_reduces_to_constant_log_variance() {
    let p = RegarchParams {
        omega: 0.3,
        beta: 0.9,
        tau1: 0.0,
        tau2: 0.0,
        gamma: vec![0.0],
        xi: vec![-0.5],
        phi: vec![1.0],
        delta1: vec![-0.1],
        delta2: vec![0.1],
        sigma: nalgebra::DMatrix::from_element(1, 1, 0.2),
    };
    for (lh, z, x) in [(0.3, 1.5, 2.0), (0.3, -2.0, -1.0), (0.3, 0.0, 0.0)] {
        assert!((regarch_reduced_recursion(&p, lh, z, &[x]) - 0.3).abs() < 1e-15);
    }
    // Away from ω the log variance decays geometrically at rate β.
    let next = regarch_reduced_recursion(&p, 1.3, 0.7, &[0.4]);
    assert!((next - (0.3 + 0.9)).abs() < 1e-12);
}

#[test]
fn rolling_window_adapts_after_a_variance_break() {
    // Break at t = k; post-break QLIKE against the true variance, 50 replications.
    let k = 300;
    let options = ForecastOptions {
        refit_stride: 30,
        ..quick()
    };
    let mut rolling_wins = 0;
    for rep in 0..50 {
        let calm = simulate(&SimConfig::new(
            100 + rep,
            k,
            Dgp::Garch {
                omega: 0.05,
                alpha: 0.05,
                beta: 0.90,
            },
        ))
        .unwrap();
        let wild = simulate(&SimConfig::new(
            200 + rep,
            600,
            Dgp::Garch {
                omega: 0.5,
                alpha: 0.10,
                beta: 0.85,
            },
        ))
        .unwrap();
        let r: Vec<f64> = calm
            .returns
            .values()
            .iter()
            .chain(wild.returns.values())
            .copied()
            .collect();
        let data = AlignedDataset::returns_only(DailyReturnSeries::from_values(r).unwrap());
        let rec = forecast_recursive(&ModelSpec::garch(), &data, k, &options).unwrap();
        let rol = forecast_rolling(&ModelSpec::garch(), &data, k, &options).unwrap();
        if qlike_values(rol.h_hat(), &wild.true_h).unwrap()
            < qlike_values(rec.h_hat(), &wild.true_h).unwrap()
        {
            rolling_wins += 1;
        }
    }
    assert!(rolling_wins > 25, "rolling better in {rolling_wins} of 50");
}

#[test]
fn regarch_beats_a_constant_forecast() {
    let options = ForecastOptions {
        refit_stride: 50,
        ..quick()
    };
    let mut wins = 0;
    for rep in 0..50 {
        let out = simulate(&SimConfig::new(300 + rep, 600, rv_dgp())).unwrap();
        let data = out.dataset().unwrap();
        let k = 450;
        let fc = forecast(
            &ModelSpec::regarch(1),
            &data,
            k,
            ForecastScheme::Recursive,
            &options,
        )
        .unwrap();
        assert_eq!(fc.refit_results.iter().filter(|s| s.refit).count(), 3);
        let truth = out.true_variance_series().unwrap();
        let constant = out.returns.values()[..k].iter().map(|x| x * x).sum::<f64>() / k as f64;
        let flat = ForecastSeries::new(fc.dates().to_vec(), vec![constant; fc.len()]).unwrap();
        let report = evaluate(&fc, &truth, &out.returns).unwrap();
        assert_eq!(report.qlike, qlike(&fc, &truth).unwrap());
        if report.qlike < qlike(&flat, &truth).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 48, "REGARCH better in {wins} of 50");
}

#[test]
fn garch_forecast_matches_the_recursion() {
    let out = simulate(&SimConfig::new(
        5,
        400,
        Dgp::Garch {
            omega: 0.05,
            alpha: 0.05,
            beta: 0.90,
        },
    ))
    .unwrap();
    let data = AlignedDataset::returns_only(out.returns.clone());
    let fc =
        forecast_recursive(&ModelSpec::garch(), &data, 399, &ForecastOptions::default()).unwrap();
    let s = &fc.refit_results[0];
    let p = GarchParams::new(s.params[0], s.params[1], s.params[2]).unwrap();
    let window = data.window(0, 399);
    let h = ModelParams::Garch(p).filter(&window, None).unwrap().h;
    let r_last = out.returns.values()[398];
    let expected = p.omega + p.alpha * r_last * r_last + p.beta * h[398];
    assert!((fc.h_hat()[0] - expected).abs() <= 1e-12 * expected);
}

#[test]
fn losses_need_matching_proxy_dates() {
    let dates: Vec<Date> = (0..3).map(Date::from_index).collect();
    let fc = ForecastSeries::new(dates.clone(), vec![1.0, 2.0, 3.0]).unwrap();
    let other: Vec<Date> = (1..4).map(Date::from_index).collect();
    let proxy = RealizedMeasureSeries::new(other, vec![1.0; 3], MeasureKind::Proxy).unwrap();
    assert!(matches!(qlike(&fc, &proxy), Err(Error::Alignment(_))));
    assert!(mse_values(&[1.0], &[1.0, 2.0]).is_err());
    assert!((qlike_values(&[2.0], &[1.0]).unwrap() - (0.5 - 0.5f64.ln() - 1.0)).abs() < 1e-15);
}
