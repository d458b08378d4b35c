//! Variance filters and Gaussian likelihoods for GARCH(1,1), GJR(1,1),
//! EGARCH(1,1) and the realized EGARCH with K measures.

mod egarch;
mod garch;
mod regarch;

pub use egarch::{egarch_filter, EgarchParams, ABS_Z_MEAN};
pub use garch::{garch_filter, gjr_filter, GarchParams, GjrParams};
pub use regarch::{regarch_filter, regarch_reduced_recursion, RegarchParams};

pub(crate) use egarch::egarch_core;
pub(crate) use garch::gjr_core;
pub(crate) use regarch::{measurement_loglik_terms, regarch_core, regarch_profile_sums};

use crate::error::{Error, Result};
use crate::series::DailyReturnSeries;
use crate::stats::LN_2PI;

/// Result of running a variance filter over a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// Conditional variances `h_1..h_T`.
    pub h: Vec<f64>,
    /// Standardized residuals `r_t / √h_t`.
    pub z: Vec<f64>,
    /// Measurement residuals, K rows of length T (empty for conventional models).
    pub u: Vec<Vec<f64>>,
    pub loglik_return: f64,
    pub loglik_measurement: f64,
    pub loglik_joint: f64,
    /// Per-observation joint log-likelihood contributions.
    pub loglik_terms: Vec<f64>,
    /// `h_{T+1}` implied by the recursion after the last observation.
    pub h_next: f64,
}

/// `l_r = −½ Σ (log 2π + log h_t + r_t² / h_t)`.
pub fn return_loglik(h: &[f64], returns: &DailyReturnSeries) -> Result<f64> {
    if h.len() != returns.len() {
        return Err(Error::InvalidParameter(format!(
            "{} variances for {} returns",
            h.len(),
            returns.len()
        )));
    }
    if let Some(i) = h.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "h[{i}] = {} is not positive",
            h[i]
        )));
    }
    Ok(return_loglik_terms(h, returns.values()).sum())
}

pub(crate) fn return_loglik_terms<'a>(
    h: &'a [f64],
    r: &'a [f64],
) -> impl Iterator<Item = f64> + 'a {
    h.iter()
        .zip(r)
        .map(|(h, r)| -0.5 * (LN_2PI + h.ln() + r * r / h))
}

/// Sample variance of the returns with 1/T normalization, the default `h_1`.
pub fn default_h1(returns: &[f64]) -> f64 {
    let v = crate::stats::variance(returns);
    if v.is_finite() && v > 0.0 {
        v
    } else {
        1.0
    }
}

pub(crate) fn conventional_output(h: Vec<f64>, r: &[f64], h_next: f64) -> FilterOutput {
    let z = h.iter().zip(r).map(|(h, r)| r / h.sqrt()).collect();
    let terms: Vec<f64> = return_loglik_terms(&h, r).collect();
    let ll: f64 = terms.iter().sum();
    FilterOutput {
        h,
        z,
        u: Vec::new(),
        loglik_return: ll,
        loglik_measurement: 0.0,
        loglik_joint: ll,
        loglik_terms: terms,
        h_next,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_loglik_examples() {
        let r = DailyReturnSeries::from_values(vec![0.0]).unwrap();
        assert!((return_loglik(&[1.0], &r).unwrap() + 0.918_938_533_204_672_7).abs() < 1e-12);
        let r = DailyReturnSeries::from_values(vec![2.0]).unwrap();
        let expected = -0.5 * ((2.0 * std::f64::consts::PI).ln() + 4f64.ln() + 1.0);
        assert!((return_loglik(&[4.0], &r).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 2.1121).abs() < 1e-4);
    }

    #[test]
    fn return_loglik_scale_family() {
        let r = DailyReturnSeries::from_values(vec![0.3, -1.1, 2.0]).unwrap();
        let h = [1.0, 2.0, 0.5];
        let c: f64 = 3.0;
        let rs =
            DailyReturnSeries::from_values(r.values().iter().map(|v| v * c).collect()).unwrap();
        let hs: Vec<f64> = h.iter().map(|v| v * c * c).collect();
        let d = return_loglik(&hs, &rs).unwrap() - return_loglik(&h, &r).unwrap();
        assert!((d + 3.0 * c.ln()).abs() < 1e-12);
    }

    #[test]
    fn return_loglik_rejects_bad_input() {
        let r = DailyReturnSeries::from_values(vec![0.0, 1.0]).unwrap();
        assert!(return_loglik(&[1.0], &r).is_err());
        assert!(return_loglik(&[1.0, 0.0], &r).is_err());
    }
}
