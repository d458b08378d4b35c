use serde::{Deserialize, Serialize};

use super::{conventional_output, FilterOutput};
use crate::error::{Error, Result};
use crate::series::DailyReturnSeries;

/// `h_t = ω + β h_{t−1} + α r²_{t−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { omega, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.alpha >= 0.0 && self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "GARCH requires omega > 0, alpha >= 0, beta >= 0 (got {:?})",
                self
            )));
        }
        Ok(())
    }

    /// `ω / (1 − α − β)`, infinite when not covariance stationary.
    pub fn unconditional_variance(&self) -> f64 {
        let p = self.alpha + self.beta;
        if p < 1.0 {
            self.omega / (1.0 - p)
        } else {
            f64::INFINITY
        }
    }
}

/// GARCH plus the indicator leverage term `τ 1{r_{t−1} < 0} r²_{t−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GjrParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

impl GjrParams {
    pub fn new(omega: f64, alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        let p = Self {
            omega,
            alpha,
            beta,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.alpha >= 0.0 && self.beta >= 0.0 && self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "GJR requires omega > 0 and alpha, beta, tau >= 0 (got {:?})",
                self
            )));
        }
        Ok(())
    }

    /// Next-day variance given today's variance and return.
    pub fn step(&self, h: f64, r: f64) -> f64 {
        let arch = if r < 0.0 {
            self.alpha + self.tau
        } else {
            self.alpha
        };
        self.omega + self.beta * h + arch * r * r
    }
}

impl From<GarchParams> for GjrParams {
    fn from(p: GarchParams) -> Self {
        Self {
            omega: p.omega,
            alpha: p.alpha,
            beta: p.beta,
            tau: 0.0,
        }
    }
}

/// Unchecked GJR recursion; returns `(h_1..h_T, h_{T+1})`.
pub(crate) fn gjr_core(p: &GjrParams, r: &[f64], h1: f64) -> Result<(Vec<f64>, f64)> {
    let mut h = Vec::with_capacity(r.len());
    let mut cur = h1;
    for (t, &rt) in r.iter().enumerate() {
        if !(cur.is_finite() && cur > 0.0) {
            return Err(Error::NumericalOverflow { index: t });
        }
        h.push(cur);
        cur = p.step(cur, rt);
    }
    if !(cur.is_finite() && cur > 0.0) {
        return Err(Error::NumericalOverflow { index: r.len() });
    }
    Ok((h, cur))
}

pub fn garch_filter(
    params: &GarchParams,
    returns: &DailyReturnSeries,
    h1: f64,
) -> Result<FilterOutput> {
    params.validate()?;
    gjr_filter(&GjrParams::from(*params), returns, h1)
}

pub fn gjr_filter(
    params: &GjrParams,
    returns: &DailyReturnSeries,
    h1: f64,
) -> Result<FilterOutput> {
    params.validate()?;
    if !(h1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "h1 must be positive, got {h1}"
        )));
    }
    let (h, next) = gjr_core(params, returns.values(), h1)?;
    Ok(conventional_output(h, returns.values(), next))
}
