use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::io::{self, sibling};
use super::{
    Command, DescribeArgs, EvaluateArgs, FitArgs, ForecastArgs, MeasureChoice, MeasuresArgs,
    ModelArgs, ModelChoice, SimulateArgs,
};
use crate::diagnostics::describe_with_ljung_box;
use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, ModelSpec};
use crate::forecast::{default_split, evaluate, forecast, ForecastOptions, ForecastSeries};
use crate::measures::{
    apply_proxy, measure_series, proxy_adjustment, realized_kernel, realized_range_volatility,
    realized_variance, RangeScaling,
};
use crate::series::{
    align, demean, AlignPolicy, AlignedDataset, MeasureKind, RealizedMeasureSeries,
};
use crate::simulation::{simulate, SimConfig};

/// Where a failing command leaves its error document.
fn error_doc_path(cmd: &Command) -> PathBuf {
    let csv_out = |p: &Path| sibling(p, "error.json");
    match cmd {
        Command::Measures(a) => csv_out(&a.out),
        Command::Forecast(a) => csv_out(&a.out),
        Command::Fit(a) => a.out.clone(),
        Command::Evaluate(a) => a.out.clone(),
        Command::Describe(a) => a.out.clone(),
        Command::Simulate(a) => a.out_dir.join("error.json"),
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Measures(_) => "measures",
        Command::Fit(_) => "fit",
        Command::Forecast(_) => "forecast",
        Command::Evaluate(_) => "evaluate",
        Command::Describe(_) => "describe",
        Command::Simulate(_) => "simulate",
    }
}

/// A failure that should exit like a usage error.
fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config(_))
}

pub(super) fn execute(cmd: &Command) -> i32 {
    let result = match cmd {
        Command::Measures(a) => cmd_measures(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Describe(a) => cmd_describe(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("regarch {}: {e}", name(cmd));
            let mut doc = Map::new();
            doc.insert("status".into(), json!("error"));
            doc.insert("command".into(), json!(name(cmd)));
            doc.insert("error".into(), json!(e.code()));
            doc.insert("message".into(), json!(e.to_string()));
            if let Err(w) = io::write_json(&error_doc_path(cmd), &doc) {
                eprintln!("regarch {}: could not write error document: {w}", name(cmd));
            }
            if is_usage(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn cmd_measures(a: &MeasuresArgs) -> Result<()> {
    let mut grids = io::read_bars(&a.bars, a.interval)?;
    if a.aggregate > 1 {
        grids = grids
            .iter()
            .map(|g| g.aggregate(a.aggregate))
            .collect::<Result<_>>()?;
    }
    let all = a.measures.contains(&MeasureChoice::All);
    let wants = |c: MeasureChoice| all || a.measures.contains(&c);
    let scaling = RangeScaling::new(a.lambda2m, a.m)?;

    let mut series: Vec<RealizedMeasureSeries> = Vec::new();
    if wants(MeasureChoice::Rv) {
        series.push(measure_series(&grids, MeasureKind::Rv, realized_variance)?);
    }
    if wants(MeasureChoice::Rrv) {
        series.push(measure_series(&grids, MeasureKind::Rrv, |g| {
            realized_range_volatility(g, &scaling)
        })?);
    }
    let rk = if wants(MeasureChoice::Rk) || a.proxy_from.is_some() {
        Some(measure_series(&grids, MeasureKind::Rk, realized_kernel)?)
    } else {
        None
    };
    if let (Some(rk), true) = (&rk, wants(MeasureChoice::Rk)) {
        series.push(rk.clone());
    }
    if let Some(path) = &a.proxy_from {
        let returns = io::read_returns(path)?;
        let rk = rk.as_ref().expect("computed above");
        let adj = proxy_adjustment(&returns, rk)?;
        log::info!("proxy scaling c_hat = {}", adj.c_hat());
        series.push(apply_proxy(rk, &adj));
    }
    let refs: Vec<&RealizedMeasureSeries> = series.iter().collect();
    io::write_measures(&a.out, &refs)
}

/// Returns plus the requested measures, aligned on common dates.
fn load_dataset(a: &ModelArgs) -> Result<AlignedDataset> {
    let returns = demean(&io::read_returns(&a.returns)?, a.demean.into());
    if a.model != ModelChoice::Regarch {
        return Ok(AlignedDataset::returns_only(returns));
    }
    if a.measures.is_empty() {
        return Err(Error::Config(
            "model regarch needs at least one --measures file".into(),
        ));
    }
    let mut found: Vec<RealizedMeasureSeries> = Vec::new();
    for path in &a.measures {
        for s in io::read_measures(path)? {
            if found.iter().any(|f| f.kind() == s.kind()) {
                return Err(Error::Config(format!(
                    "measure kind {} appears in more than one file",
                    s.kind()
                )));
            }
            found.push(s);
        }
    }
    let chosen: Vec<RealizedMeasureSeries> = if a.kinds.is_empty() {
        found
            .into_iter()
            .filter(|s| s.kind() != MeasureKind::Proxy)
            .collect()
    } else {
        a.kinds
            .iter()
            .map(|k| {
                found
                    .iter()
                    .find(|s| s.kind() == *k)
                    .cloned()
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "measure kind {k} not found in the --measures files"
                        ))
                    })
            })
            .collect::<Result<_>>()?
    };
    if chosen.is_empty() {
        return Err(Error::Config(
            "no usable measure series for model regarch".into(),
        ));
    }
    let data = align(&returns, &chosen, AlignPolicy::Intersect)?;
    if data.len() < returns.len() {
        log::info!(
            "alignment kept {} of {} return dates",
            data.len(),
            returns.len()
        );
    }
    Ok(data)
}

fn model_spec(a: &ModelArgs, data: &AlignedDataset) -> ModelSpec {
    match a.model {
        ModelChoice::Garch => ModelSpec::garch().with_stationarity(!a.no_stationarity),
        ModelChoice::Gjr => ModelSpec::gjr(),
        ModelChoice::Egarch => ModelSpec::egarch(),
        ModelChoice::Regarch => ModelSpec::regarch(data.n_measures())
            .with_free_phi(a.free_phi)
            .with_stationarity(!a.no_stationarity),
    }
}

fn fit_options(a: &ModelArgs) -> FitOptions {
    FitOptions {
        seed: a.seed,
        n_starts: a.starts,
        ..FitOptions::default()
    }
}

fn measure_list(data: &AlignedDataset) -> String {
    data.measures()
        .iter()
        .map(|m| m.kind().as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let data = load_dataset(&a.model)?;
    let spec = model_spec(&a.model, &data);
    let res = fit(&spec, &data, &fit_options(&a.model))?;

    let mut doc = Map::new();
    doc.insert("status".into(), json!("ok"));
    doc.insert("command".into(), json!("fit"));
    doc.insert("model".into(), json!(spec.name()));
    doc.insert("measures".into(), json!(measure_list(&data)));
    doc.insert("seed".into(), json!(res.seed));
    doc.insert("n_obs".into(), json!(res.n_obs));
    doc.insert("first_date".into(), json!(data.dates()[0].as_str()));
    doc.insert(
        "last_date".into(),
        json!(data.dates()[data.len() - 1].as_str()),
    );
    doc.insert("converged".into(), json!(res.converged));
    doc.insert("n_iterations".into(), json!(res.n_iterations));
    doc.insert("n_evaluations".into(), json!(res.n_evaluations));
    doc.insert("grad_norm".into(), json!(res.grad_norm));
    doc.insert("best_start".into(), json!(res.best_start));
    doc.insert("loglik_joint".into(), json!(res.loglik_joint));
    doc.insert("loglik_return".into(), json!(res.loglik_return));
    doc.insert("aic".into(), json!(res.aic));
    doc.insert("sbic".into(), json!(res.sbic));
    doc.insert("n_params".into(), json!(res.n_params));
    let names = res.std_error_names();
    let values = res.full_natural();
    for (n, v) in names.iter().zip(&values) {
        doc.insert(format!("param.{n}"), json!(v));
    }
    doc.insert("se_available".into(), json!(res.std_errors.is_some()));
    if let Some(se) = &res.std_errors {
        for (n, v) in names.iter().zip(se) {
            doc.insert(format!("se.{n}"), json!(v));
        }
    }
    io::write_json(&a.out, &doc)
}

fn cmd_forecast(a: &ForecastArgs) -> Result<()> {
    let data = load_dataset(&a.model)?;
    let spec = model_spec(&a.model, &data);
    let k = a.k.unwrap_or_else(|| default_split(data.len()));
    let options = ForecastOptions {
        fit: fit_options(&a.model),
        refit_stride: a.refit_stride,
        ..Default::default()
    };
    let fc = forecast(&spec, &data, k, a.scheme.into(), &options)?;
    io::write_forecasts(&a.out, &fc)?;

    let names = spec.param_names();
    let origins: Vec<Value> = fc
        .refit_results
        .iter()
        .map(|o| {
            let params: Map<String, Value> = names
                .iter()
                .cloned()
                .zip(o.params.iter().map(|v| json!(v)))
                .collect();
            json!({
                "origin": o.origin,
                "date": o.date.as_str(),
                "window_start": o.window_start,
                "window_end": o.window_end,
                "refit": o.refit,
                "converged": o.converged,
                "carried_forward": o.carried_forward,
                "loglik_joint": o.loglik_joint,
                "n_iterations": o.n_iterations,
                "params": params,
                "error": o.error,
            })
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("status".into(), json!("ok"));
    doc.insert("command".into(), json!("forecast"));
    doc.insert("model".into(), json!(spec.name()));
    doc.insert("measures".into(), json!(measure_list(&data)));
    doc.insert("scheme".into(), json!(fc.scheme.map(|s| s.as_str())));
    doc.insert("k".into(), json!(k));
    doc.insert("seed".into(), json!(a.model.seed));
    doc.insert("refit_stride".into(), json!(options.refit_stride));
    doc.insert("n_forecasts".into(), json!(fc.len()));
    doc.insert("n_failed".into(), json!(fc.failed_origins().count()));
    doc.insert("origins".into(), Value::Array(origins));
    io::write_json(&sibling(&a.out, "refits.json"), &doc)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let mut models: Vec<(String, ForecastSeries)> = Vec::new();
    for spec in &a.forecasts {
        let (label, path) = match spec.split_once('=') {
            Some((l, p)) => (l.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(spec);
                let stem = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| spec.clone());
                (stem, p)
            }
        };
        if models.iter().any(|(l, _)| *l == label) {
            return Err(Error::Config(format!("duplicate forecast label `{label}`")));
        }
        models.push((label, io::read_forecasts(&path)?));
    }
    let all = io::read_measures(&a.proxy)?;
    let proxy = match all.iter().position(|s| s.kind() == MeasureKind::Proxy) {
        Some(i) => all[i].clone(),
        None if all.len() == 1 => all[0].clone(),
        None => {
            return Err(Error::Config(format!(
                "{} has no `proxy` rows and more than one measure kind",
                a.proxy.display()
            )))
        }
    };
    let returns = io::read_returns(&a.returns)?;

    let mut doc = Map::new();
    doc.insert("status".into(), json!("ok"));
    doc.insert("command".into(), json!("evaluate"));
    doc.insert("proxy_kind".into(), json!(proxy.kind().as_str()));
    doc.insert(
        "models".into(),
        json!(models
            .iter()
            .map(|(l, _)| l.as_str())
            .collect::<Vec<_>>()
            .join(",")),
    );
    let first_dates = models[0].1.dates().to_vec();
    doc.insert("n_evaluated".into(), json!(first_dates.len()));
    for (label, f) in &models {
        if f.dates() != first_dates.as_slice() {
            return Err(Error::Alignment(format!(
                "forecast `{label}` covers different dates than `{}`",
                models[0].0
            )));
        }
        let report = evaluate(f, &proxy, &returns)?;
        doc.insert(format!("{label}.mse"), json!(report.mse));
        doc.insert(format!("{label}.qlike"), json!(report.qlike));
        doc.insert(format!("{label}.loglik_out"), json!(report.loglik_out));
    }

    let plot_path = sibling(&a.out, "plot.csv");
    let file = std::fs::File::create(&plot_path)
        .map_err(|e| Error::Io(format!("{}: {e}", plot_path.display())))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["date".to_string(), "proxy".to_string()];
    header.extend(models.iter().map(|(l, _)| l.clone()));
    w.write_record(&header)?;
    for (i, d) in first_dates.iter().enumerate() {
        let mut row = vec![
            d.to_string(),
            proxy.get(d).expect("checked by evaluate").to_string(),
        ];
        row.extend(models.iter().map(|(_, f)| f.h_hat()[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    io::write_json(&a.out, &doc)
}

fn cmd_describe(a: &DescribeArgs) -> Result<()> {
    let (_, mut values) = io::read_value_series(&a.input, a.kind)?;
    if a.log {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidSeries(format!("cannot take the log of {v}")));
        }
        values.iter_mut().for_each(|v| *v = v.ln());
    }
    let report = describe_with_ljung_box(&values, a.lags, a.lb_adjust.into())?;
    let lb = report.ljung_box.expect("requested");
    let mut doc = Map::new();
    doc.insert("status".into(), json!("ok"));
    doc.insert("command".into(), json!("describe"));
    doc.insert("log".into(), json!(a.log));
    doc.insert("n".into(), json!(report.n));
    doc.insert("mean".into(), json!(report.mean));
    doc.insert("sd".into(), json!(report.sd));
    doc.insert("max".into(), json!(report.max));
    doc.insert("min".into(), json!(report.min));
    doc.insert("skewness".into(), json!(report.skewness));
    doc.insert("kurtosis".into(), json!(report.kurtosis));
    doc.insert("se_mean".into(), json!(report.se_mean));
    doc.insert("se_skew".into(), json!(report.se_skew));
    doc.insert("se_kurt".into(), json!(report.se_kurt));
    doc.insert("jb".into(), json!(report.jb_stat));
    doc.insert("lb_lags".into(), json!(lb.lags));
    doc.insert("lb_adjust".into(), json!(lb.adjust));
    doc.insert("lb_stat".into(), json!(lb.stat));
    io::write_json(&a.out, &doc)
}

/// Bar timestamps start at 09:00 and mark each bar's end.
const SESSION_START: i64 = 9 * 3600;

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out_dir)?;
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Error::Io(format!("{}: {e}", a.config.display())))?;
    let mut config: SimConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let out = simulate(&config)?;

    let mut files = vec!["returns.csv".to_string(), "true_variance.csv".to_string()];
    io::write_returns(&a.out_dir.join("returns.csv"), &out.returns)?;
    io::write_measures(
        &a.out_dir.join("true_variance.csv"),
        &[&out.true_variance_series()?],
    )?;
    for m in &out.measures {
        let file = format!("measure_{}.csv", m.kind());
        io::write_measures(&a.out_dir.join(&file), &[m])?;
        files.push(file);
    }
    if let Some(grids) = &out.grids {
        io::write_bars(&a.out_dir.join("bars.csv"), grids, SESSION_START)?;
        files.push("bars.csv".into());
    }
    let dgp = toml::Value::try_from(&config.dgp)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str().map(String::from)))
        .unwrap_or_default();
    let mut doc = Map::new();
    doc.insert("status".into(), json!("ok"));
    doc.insert("command".into(), json!("simulate"));
    doc.insert("seed".into(), json!(config.seed));
    doc.insert("dgp".into(), json!(dgp));
    doc.insert("days".into(), json!(config.days));
    doc.insert("files".into(), json!(files.join(",")));
    io::write_json(&a.out_dir.join("simulation.json"), &doc)
}
