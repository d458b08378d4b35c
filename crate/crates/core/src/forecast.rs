//! One-step-ahead variance forecasts and their evaluation.
//!
//! With `T` observations and an estimation window of `k`, origin
//! `i = 1..T−k` forecasts `h_{k+i}` from a model fitted to observations
//! `1..k+i−1` (recursive) or to the `k` observations ending at `k+i−1`
//! (rolling). Both schemes use the same sample at `i = 1`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{fit, FitOptions, ModelParams, ModelSpec, PreparedData};
use crate::series::{AlignedDataset, DailyReturnSeries, Date, RealizedMeasureSeries};
use crate::stats::LN_2PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecastScheme {
    Recursive,
    Rolling,
}

impl ForecastScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForecastScheme::Recursive => "recursive",
            ForecastScheme::Rolling => "rolling",
        }
    }

    /// Half-open window `[start, end)` (0-based) used at origin `i ≥ 1`.
    pub fn window(&self, k: usize, i: usize) -> (usize, usize) {
        let end = k + i - 1;
        match self {
            ForecastScheme::Recursive => (0, end),
            ForecastScheme::Rolling => (i - 1, end),
        }
    }
}

impl fmt::Display for ForecastScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ForecastScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(ForecastScheme::Recursive),
            "rolling" => Ok(ForecastScheme::Rolling),
            other => Err(Error::Config(format!(
                "unknown forecast scheme `{other}` (expected recursive or rolling)"
            ))),
        }
    }
}

/// `⌊3T/4⌋`, the default estimation window.
pub fn default_split(t: usize) -> usize {
    3 * t / 4
}

#[derive(Debug, Clone)]
pub struct ForecastOptions {
    /// Options for the first fit.
    pub fit: FitOptions,
    /// Refit every `refit_stride` origins; parameters are held in between.
    pub refit_stride: usize,
    /// Start each refit from the previous optimum.
    pub warm_start: bool,
    /// Size of the standard multistart set for refits after the first
    /// (defaults to `fit.n_starts`).
    pub refit_starts: Option<usize>,
}

impl Default for ForecastOptions {
    fn default() -> Self {
        Self {
            fit: FitOptions::default(),
            refit_stride: 1,
            warm_start: true,
            refit_starts: None,
        }
    }
}

/// What happened at one forecast origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginSummary {
    pub origin: usize,
    /// Date of the forecast target `k+i`.
    pub date: Date,
    pub window_start: usize,
    pub window_end: usize,
    /// A fit was attempted at this origin.
    pub refit: bool,
    pub converged: bool,
    /// Parameters from an earlier origin were reused after a failed fit.
    pub carried_forward: bool,
    pub loglik_joint: Option<f64>,
    pub n_iterations: usize,
    pub params: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries {
    dates: Vec<Date>,
    h_hat: Vec<f64>,
    pub scheme: Option<ForecastScheme>,
    pub window: Option<usize>,
    pub refit_results: Vec<OriginSummary>,
}

impl ForecastSeries {
    /// A bare series (e.g. read back from a file).
    pub fn new(dates: Vec<Date>, h_hat: Vec<f64>) -> Result<Self> {
        if dates.len() != h_hat.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates for {} forecasts",
                dates.len(),
                h_hat.len()
            )));
        }
        if let Some(i) = h_hat.iter().position(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidSeries(format!(
                "forecast {} on {} is not positive",
                h_hat[i], dates[i]
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSeries(format!(
                "forecast dates not increasing at {}",
                w[1]
            )));
        }
        Ok(Self {
            dates,
            h_hat,
            scheme: None,
            window: None,
            refit_results: Vec::new(),
        })
    }

    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn h_hat(&self) -> &[f64] {
        &self.h_hat
    }

    pub fn len(&self) -> usize {
        self.h_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_hat.is_empty()
    }

    /// Origins whose fit failed.
    pub fn failed_origins(&self) -> impl Iterator<Item = &OriginSummary> {
        self.refit_results.iter().filter(|o| o.error.is_some())
    }
}

pub fn forecast_recursive(
    spec: &ModelSpec,
    data: &AlignedDataset,
    k: usize,
    options: &ForecastOptions,
) -> Result<ForecastSeries> {
    forecast(spec, data, k, ForecastScheme::Recursive, options)
}

pub fn forecast_rolling(
    spec: &ModelSpec,
    data: &AlignedDataset,
    k: usize,
    options: &ForecastOptions,
) -> Result<ForecastSeries> {
    forecast(spec, data, k, ForecastScheme::Rolling, options)
}

fn params_at(spec: &ModelSpec, window: &AlignedDataset, natural: &[f64]) -> Result<ModelParams> {
    let sigma = match spec.kind {
        crate::estimation::ModelKind::Regarch => {
            Some(spec.profiled_sigma(natural, &PreparedData::new(window, None))?)
        }
        _ => None,
    };
    Ok(spec.build(natural, sigma))
}

/// Re-estimates at every origin (or every `refit_stride` origins) and
/// forecasts one step ahead from the filtered end of the window.
///
/// A failed fit keeps the most recent parameters and is recorded in
/// `refit_results`. A failure at the first origin falls back to the best
/// point found if the optimizer got that far, otherwise it is an error.
pub fn forecast(
    spec: &ModelSpec,
    data: &AlignedDataset,
    k: usize,
    scheme: ForecastScheme,
    options: &ForecastOptions,
) -> Result<ForecastSeries> {
    let t_len = data.len();
    if k >= t_len {
        return Err(Error::InsufficientData {
            needed: k + 1,
            got: t_len,
        });
    }
    if k < options.fit.min_obs {
        return Err(Error::InsufficientData {
            needed: options.fit.min_obs,
            got: k,
        });
    }
    spec.check_data(data)?;
    let stride = options.refit_stride.max(1);

    let mut dates = Vec::with_capacity(t_len - k);
    let mut h_hat = Vec::with_capacity(t_len - k);
    let mut summaries = Vec::with_capacity(t_len - k);
    let mut current: Option<Vec<f64>> = None;

    for i in 1..=t_len - k {
        let (start, end) = scheme.window(k, i);
        let window = data.window(start, end);
        let refit = (i - 1) % stride == 0;
        let mut summary = OriginSummary {
            origin: i,
            date: data.dates()[end].clone(),
            window_start: start,
            window_end: end,
            refit,
            converged: false,
            carried_forward: false,
            loglik_joint: None,
            n_iterations: 0,
            params: Vec::new(),
            error: None,
        };
        if refit {
            let mut fo = options.fit.clone();
            fo.compute_std_errors = false;
            if let Some(prev) = &current {
                if options.warm_start {
                    fo.warm_start = Some(prev.clone());
                }
                fo.n_starts = options.refit_starts.unwrap_or(options.fit.n_starts);
            }
            match fit(spec, &window, &fo) {
                Ok(res) => {
                    summary.converged = true;
                    summary.loglik_joint = Some(res.loglik_joint);
                    summary.n_iterations = res.n_iterations;
                    current = Some(res.natural);
                }
                Err(e) => {
                    log::warn!("origin {i} ({}): {e}", summary.date);
                    summary.error = Some(e.to_string());
                    match (&current, e) {
                        (Some(_), _) => summary.carried_forward = true,
                        (
                            None,
                            Error::NonConvergence {
                                best_natural,
                                best_mean_loglik,
                                ..
                            },
                        ) if best_mean_loglik.is_finite() => {
                            current = Some(best_natural);
                        }
                        (None, e) => return Err(e),
                    }
                }
            }
        }
        let natural = current.clone().expect("parameters set at the first origin");
        let params = params_at(spec, &window, &natural)?;
        let h = params.forecast_next(&window, None)?;
        summary.params = natural;
        dates.push(summary.date.clone());
        h_hat.push(h);
        summaries.push(summary);
    }

    let mut series = ForecastSeries::new(dates, h_hat)?;
    series.scheme = Some(scheme);
    series.window = Some(k);
    series.refit_results = summaries;
    Ok(series)
}

/// Values of `series` on each forecast date.
fn lookup(forecasts: &ForecastSeries, series: &RealizedMeasureSeries) -> Result<Vec<f64>> {
    forecasts
        .dates()
        .iter()
        .map(|d| {
            series.get(d).ok_or_else(|| {
                Error::Alignment(format!("no {} value for forecast date {d}", series.kind()))
            })
        })
        .collect()
}

fn check_pairs(h: &[f64], target: &[f64]) -> Result<()> {
    if h.len() != target.len() {
        return Err(Error::Alignment(format!(
            "{} forecasts for {} targets",
            h.len(),
            target.len()
        )));
    }
    if h.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(())
}

/// Mean of `(h − σ²)²`.
pub fn mse_values(h: &[f64], proxy: &[f64]) -> Result<f64> {
    check_pairs(h, proxy)?;
    Ok(h.iter()
        .zip(proxy)
        .map(|(h, s)| (h - s) * (h - s))
        .sum::<f64>()
        / h.len() as f64)
}

/// Mean of `x − ln x − 1` with `x = σ²/h`.
pub fn qlike_values(h: &[f64], proxy: &[f64]) -> Result<f64> {
    check_pairs(h, proxy)?;
    let mut acc = 0.0;
    for (h, s) in h.iter().zip(proxy) {
        if !(*h > 0.0 && *s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "QLIKE needs positive values, got h = {h}, proxy = {s}"
            )));
        }
        let x = s / h;
        acc += x - x.ln() - 1.0;
    }
    Ok(acc / h.len() as f64)
}

/// `−½ Σ (ln 2π + ln h + r²/h)`.
pub fn loglik_values(h: &[f64], returns: &[f64]) -> Result<f64> {
    check_pairs(h, returns)?;
    if let Some(v) = h.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "variance forecast {v} is not positive"
        )));
    }
    Ok(h.iter()
        .zip(returns)
        .map(|(h, r)| -0.5 * (LN_2PI + h.ln() + r * r / h))
        .sum())
}

pub fn mse(forecasts: &ForecastSeries, proxy: &RealizedMeasureSeries) -> Result<f64> {
    mse_values(forecasts.h_hat(), &lookup(forecasts, proxy)?)
}

pub fn qlike(forecasts: &ForecastSeries, proxy: &RealizedMeasureSeries) -> Result<f64> {
    qlike_values(forecasts.h_hat(), &lookup(forecasts, proxy)?)
}

/// Gaussian predictive log-likelihood of the returns on the forecast dates.
pub fn out_of_sample_loglik(
    forecasts: &ForecastSeries,
    returns: &DailyReturnSeries,
) -> Result<f64> {
    let r = forecasts
        .dates()
        .iter()
        .map(|d| {
            returns
                .dates()
                .binary_search(d)
                .map(|i| returns.values()[i])
                .map_err(|_| Error::Alignment(format!("no return for forecast date {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    loglik_values(forecasts.h_hat(), &r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossReport {
    pub mse: f64,
    pub qlike: f64,
    pub loglik_out: f64,
    pub n_evaluated: usize,
}

pub fn evaluate(
    forecasts: &ForecastSeries,
    proxy: &RealizedMeasureSeries,
    returns: &DailyReturnSeries,
) -> Result<LossReport> {
    Ok(LossReport {
        mse: mse(forecasts, proxy)?,
        qlike: qlike(forecasts, proxy)?,
        loglik_out: out_of_sample_loglik(forecasts, returns)?,
        n_evaluated: forecasts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MeasureKind;

    fn series(h: &[f64]) -> ForecastSeries {
        ForecastSeries::new((0..h.len()).map(Date::from_index).collect(), h.to_vec()).unwrap()
    }

    fn proxy(v: &[f64]) -> RealizedMeasureSeries {
        RealizedMeasureSeries::new(
            (0..v.len()).map(Date::from_index).collect(),
            v.to_vec(),
            MeasureKind::Proxy,
        )
        .unwrap()
    }

    #[test]
    fn loss_examples() {
        assert_eq!(mse(&series(&[1.0, 2.0]), &proxy(&[1.0, 1.0])).unwrap(), 0.5);
        let q = qlike(&series(&[1.0]), &proxy(&[2.0])).unwrap();
        assert!((q - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert_eq!(
            qlike(&series(&[0.7, 3.0]), &proxy(&[0.7, 3.0])).unwrap(),
            0.0
        );
        assert!(qlike_values(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn loglik_examples() {
        assert!((loglik_values(&[1.0], &[0.0]).unwrap() + 0.918_938_533).abs() < 1e-9);
        assert!((loglik_values(&[4.0], &[2.0]).unwrap() + 2.112_085_713).abs() < 1e-9);
    }

    #[test]
    fn missing_proxy_date_is_alignment_error() {
        let f = series(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            mse(&f, &proxy(&[1.0, 1.0])),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn windows() {
        assert_eq!(ForecastScheme::Recursive.window(10, 1), (0, 10));
        assert_eq!(ForecastScheme::Rolling.window(10, 1), (0, 10));
        assert_eq!(ForecastScheme::Recursive.window(10, 4), (0, 13));
        assert_eq!(ForecastScheme::Rolling.window(10, 4), (3, 13));
        assert_eq!(default_split(1848), 1386);
        assert!("Rolling".parse::<ForecastScheme>().is_err());
    }
}
