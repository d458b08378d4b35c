//! Descriptive statistics, Jarque–Bera and Ljung–Box.
//!
//! Moments use 1/T normalization; kurtosis is non-excess (Gaussian = 3).

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LjungBoxResult {
    pub stat: f64,
    pub lags: usize,
    pub adjust: LjungBoxAdjust,
}

/// Table-style summary of a single series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveReport {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub max: f64,
    pub min: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub se_mean: f64,
    pub se_skew: f64,
    pub se_kurt: f64,
    pub jb_stat: f64,
    pub ljung_box: Option<LjungBoxResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LjungBoxAdjust {
    None,
    #[default]
    Heteroskedasticity,
}

/// `(T/6) (Sk² + (Ku − 3)²/4)`.
pub fn jarque_bera(skewness: f64, kurtosis: f64, n: usize) -> f64 {
    let t = n as f64;
    t / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0)
}

/// Asymptotic standard errors of sample skewness and kurtosis.
pub fn moment_standard_errors(n: usize) -> (f64, f64) {
    let t = n as f64;
    ((6.0 / t).sqrt(), (24.0 / t).sqrt())
}

fn centered(series: &[f64]) -> Result<(Vec<f64>, f64)> {
    let t = series.len() as f64;
    let mean = series.iter().sum::<f64>() / t;
    let c: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let m2 = c.iter().map(|d| d * d).sum::<f64>() / t;
    let scale = series
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    if !(m2 > 0.0) || m2.sqrt() <= 1e-13 * scale {
        return Err(Error::DegenerateVariance);
    }
    Ok((c, m2))
}

pub fn describe(series: &[f64]) -> Result<DescriptiveReport> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    let (c, m2) = centered(series)?;
    let t = n as f64;
    let mean = series.iter().sum::<f64>() / t;
    let m3 = c.iter().map(|d| d * d * d).sum::<f64>() / t;
    let m4 = c.iter().map(|d| d * d * d * d).sum::<f64>() / t;
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let sd = m2.sqrt();
    let (se_skew, se_kurt) = moment_standard_errors(n);
    Ok(DescriptiveReport {
        n,
        mean,
        sd,
        max: series.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min: series.iter().copied().fold(f64::INFINITY, f64::min),
        skewness,
        kurtosis,
        se_mean: sd / t.sqrt(),
        se_skew,
        se_kurt,
        jb_stat: jarque_bera(skewness, kurtosis, n),
        ljung_box: None,
    })
}

/// [`describe`] plus a Ljung–Box statistic.
pub fn describe_with_ljung_box(
    series: &[f64],
    lags: usize,
    adjust: LjungBoxAdjust,
) -> Result<DescriptiveReport> {
    let mut report = describe(series)?;
    report.ljung_box = Some(LjungBoxResult {
        stat: ljung_box(series, lags, adjust)?,
        lags,
        adjust,
    });
    Ok(report)
}

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if max_lag == 0 || n <= max_lag {
        return Err(Error::InsufficientData {
            needed: max_lag + 1,
            got: n,
        });
    }
    let (c, _) = centered(series)?;
    let denom: f64 = c.iter().map(|d| d * d).sum();
    Ok((1..=max_lag)
        .map(|j| (j..n).map(|t| c[t] * c[t - j]).sum::<f64>() / denom)
        .collect())
}

/// `Q = T(T+2) Σ ρ̃_j² / (T − j)`.
///
/// With `Heteroskedasticity`, each `ρ̂_j` is divided by `√(T v̂_j)` where
/// `v̂_j = Σ c_t² c_{t−j}² / (Σ c_t²)²`; under homoskedasticity `T v̂_j ≈ 1`.
pub fn ljung_box(series: &[f64], lags: usize, adjust: LjungBoxAdjust) -> Result<f64> {
    let n = series.len();
    if lags == 0 || lags + 1 >= n {
        return Err(Error::InsufficientData {
            needed: lags + 2,
            got: n,
        });
    }
    let (c, _) = centered(series)?;
    let t = n as f64;
    let denom: f64 = c.iter().map(|d| d * d).sum();
    let mut q = 0.0;
    for j in 1..=lags {
        let rho = (j..n).map(|s| c[s] * c[s - j]).sum::<f64>() / denom;
        let rho2 = match adjust {
            LjungBoxAdjust::None => rho * rho,
            LjungBoxAdjust::Heteroskedasticity => {
                let v = (j..n)
                    .map(|s| c[s] * c[s] * c[s - j] * c[s - j])
                    .sum::<f64>()
                    / (denom * denom);
                if v <= 0.0 {
                    return Err(Error::DegenerateVariance);
                }
                rho * rho / (t * v)
            }
        };
        q += rho2 / (t - j as f64);
    }
    Ok(t * (t + 2.0) * q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jb_reproduces_table_values() {
        let jb = jarque_bera(-0.540, 8.226, 1848);
        assert!((jb - 2192.91).abs() / 2192.91 < 5e-3, "{jb}");
        let jb = jarque_bera(0.738, 4.470, 1848);
        assert!((jb - 334.02).abs() / 334.02 < 5e-3, "{jb}");
        assert_eq!(jarque_bera(0.0, 3.0, 100), 0.0);
    }

    #[test]
    fn moment_ses() {
        let (s, k) = moment_standard_errors(1848);
        assert_eq!(format!("{s:.3}"), "0.057");
        assert_eq!(format!("{k:.3}"), "0.114");
    }

    #[test]
    fn describe_hand_values() {
        // mean 4, m2 = 10; higher moments straight from the deviations.
        let x = [1.0, 2.0, 3.0, 4.0, 10.0];
        let r = describe(&x).unwrap();
        let c: Vec<f64> = x.iter().map(|v| v - 4.0).collect();
        let m2 = c.iter().map(|d| d * d).sum::<f64>() / 5.0;
        let m3 = c.iter().map(|d| d.powi(3)).sum::<f64>() / 5.0;
        let m4 = c.iter().map(|d| d.powi(4)).sum::<f64>() / 5.0;
        assert_eq!(m2, 10.0);
        assert_eq!(r.mean, 4.0);
        assert!((r.skewness - m3 / 10f64.powf(1.5)).abs() < 1e-12);
        assert!((r.kurtosis - m4 / 100.0).abs() < 1e-12);
        assert_eq!(r.max, 10.0);
        assert_eq!(r.min, 1.0);
    }

    #[test]
    fn describe_errors() {
        assert_eq!(
            describe(&[1.0, 2.0, 3.0]).unwrap_err(),
            Error::InsufficientData { needed: 4, got: 3 }
        );
        assert_eq!(describe(&[0.1; 10]).unwrap_err(), Error::DegenerateVariance);
        assert_eq!(
            ljung_box(&[2.0; 50], 10, LjungBoxAdjust::None).unwrap_err(),
            Error::DegenerateVariance
        );
        assert!(ljung_box(&[1.0, 2.0, 3.0], 2, LjungBoxAdjust::None).is_err());
    }

    #[test]
    fn alternating_series_lag_one() {
        let x: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let rho = autocorrelation(&x, 3).unwrap();
        // mean is 0, so rho_1 = -99/100 exactly.
        assert!((rho[0] + 0.99).abs() < 1e-12);
        assert!((rho[1] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn negation_flips_skew_only() {
        let x = [0.3, -1.2, 2.5, 0.1, 0.7, -0.4, 3.3, -2.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = describe(&x).unwrap();
        let b = describe(&neg).unwrap();
        assert!((a.skewness + b.skewness).abs() < 1e-12);
        assert!((a.kurtosis - b.kurtosis).abs() < 1e-12);
        assert!((a.jb_stat - b.jb_stat).abs() < 1e-9);
    }
}
