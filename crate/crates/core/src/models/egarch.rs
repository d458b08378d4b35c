use serde::{Deserialize, Serialize};

use super::{conventional_output, FilterOutput};
use crate::error::{Error, Result};
use crate::series::DailyReturnSeries;

/// `E|z|` for a standard normal `z`, `√(2/π)`.
pub const ABS_Z_MEAN: f64 = 0.797_884_560_802_865_4;

/// `log h_t = ω + β(log h_{t−1} − ω) + τ₁₁ z_{t−1} + τ₁₂(|z_{t−1}| − E|z|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgarchParams {
    pub omega: f64,
    pub beta: f64,
    pub tau11: f64,
    pub tau12: f64,
}

impl EgarchParams {
    pub fn new(omega: f64, beta: f64, tau11: f64, tau12: f64) -> Result<Self> {
        let p = Self {
            omega,
            beta,
            tau11,
            tau12,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.beta, self.tau11, self.tau12]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.beta.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "EGARCH requires |beta| < 1 (got {:?})",
                self
            )));
        }
        Ok(())
    }

    pub fn step(&self, logh: f64, z: f64) -> f64 {
        self.omega
            + self.beta * (logh - self.omega)
            + self.tau11 * z
            + self.tau12 * (z.abs() - ABS_Z_MEAN)
    }
}

pub(crate) fn egarch_core(p: &EgarchParams, r: &[f64], logh1: f64) -> Result<(Vec<f64>, f64)> {
    let mut h = Vec::with_capacity(r.len());
    let mut lh = logh1;
    for (t, &rt) in r.iter().enumerate() {
        let ht = lh.exp();
        if !(lh.is_finite() && ht > 0.0 && ht.is_finite()) {
            return Err(Error::NumericalOverflow { index: t });
        }
        h.push(ht);
        lh = p.step(lh, rt / ht.sqrt());
    }
    let next = lh.exp();
    if !(next.is_finite() && next > 0.0) {
        return Err(Error::NumericalOverflow { index: r.len() });
    }
    Ok((h, next))
}

pub fn egarch_filter(
    params: &EgarchParams,
    returns: &DailyReturnSeries,
    logh1: f64,
) -> Result<FilterOutput> {
    params.validate()?;
    if !logh1.is_finite() {
        return Err(Error::InvalidParameter("log h1 must be finite".into()));
    }
    let (h, next) = egarch_core(params, returns.values(), logh1)?;
    Ok(conventional_output(h, returns.values(), next))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_moment() {
        assert!((ABS_Z_MEAN - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn fixed_point_without_leverage() {
        let p = EgarchParams::new(0.3, 0.9, 0.0, 0.0).unwrap();
        let r = DailyReturnSeries::from_values(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let out = egarch_filter(&p, &r, 0.3).unwrap();
        for h in &out.h {
            assert!((h.ln() - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_recursion() {
        let p = EgarchParams::new(0.0, 0.9, -0.1, 0.2).unwrap();
        let r = DailyReturnSeries::from_values(vec![1.0, 0.0]).unwrap();
        let out = egarch_filter(&p, &r, 0.0).unwrap();
        let expected = -0.1 + 0.2 * (1.0 - ABS_Z_MEAN);
        assert!((out.h[1].ln() - expected).abs() < 1e-14);
        assert!((expected + 0.0596).abs() < 1e-4);
    }

    #[test]
    fn negative_shock_raises_variance_more() {
        let p = EgarchParams::new(0.1, 0.9, -0.1, 0.2).unwrap();
        let neg = egarch_filter(
            &p,
            &DailyReturnSeries::from_values(vec![-1.5, 0.0]).unwrap(),
            0.0,
        )
        .unwrap();
        let pos = egarch_filter(
            &p,
            &DailyReturnSeries::from_values(vec![1.5, 0.0]).unwrap(),
            0.0,
        )
        .unwrap();
        assert!(neg.h[1] > pos.h[1]);
    }

    #[test]
    fn rejects_unit_root() {
        assert!(EgarchParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(EgarchParams::new(0.0, -1.2, 0.0, 0.0).is_err());
    }
}
