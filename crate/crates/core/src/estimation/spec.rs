//! Model specifications: parameter naming, transforms between natural and
//! unconstrained coordinates, starting values and the objective.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    default_h1, egarch_core, gjr_core, measurement_loglik_terms, regarch_core,
    regarch_profile_sums, regarch_reduced_recursion, EgarchParams, FilterOutput, GarchParams,
    GjrParams, RegarchParams,
};
use crate::series::AlignedDataset;
use crate::stats::{logistic, logit, LN_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Garch,
    Gjr,
    Egarch,
    Regarch,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "garch" => Ok(ModelKind::Garch),
            "gjr" => Ok(ModelKind::Gjr),
            "egarch" => Ok(ModelKind::Egarch),
            "regarch" => Ok(ModelKind::Regarch),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// A model family together with its estimation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Number of realized measures (REGARCH only).
    pub k: usize,
    /// Estimate φ_k instead of fixing it at 1 (REGARCH only).
    pub free_phi: bool,
    /// Enforce α + β < 1 (GARCH) or an invertible filter, |β − Σ γ_k φ_k| < 1
    /// (REGARCH).
    pub stationarity: bool,
}

impl ModelSpec {
    pub fn garch() -> Self {
        Self {
            kind: ModelKind::Garch,
            k: 0,
            free_phi: false,
            stationarity: true,
        }
    }

    pub fn gjr() -> Self {
        Self {
            kind: ModelKind::Gjr,
            ..Self::garch()
        }
    }

    pub fn egarch() -> Self {
        Self {
            kind: ModelKind::Egarch,
            ..Self::garch()
        }
    }

    pub fn regarch(k: usize) -> Self {
        Self {
            kind: ModelKind::Regarch,
            k,
            free_phi: false,
            stationarity: true,
        }
    }

    pub fn with_free_phi(mut self, free: bool) -> Self {
        self.free_phi = free;
        self
    }

    pub fn with_stationarity(mut self, on: bool) -> Self {
        self.stationarity = on;
        self
    }

    pub fn name(&self) -> String {
        match self.kind {
            ModelKind::Garch => "GARCH".into(),
            ModelKind::Gjr => "GJR".into(),
            ModelKind::Egarch => "EGARCH".into(),
            ModelKind::Regarch => {
                let phi = if self.free_phi { "-freephi" } else { "" };
                format!("REGARCH-K{}{}", self.k, phi)
            }
        }
    }

    /// Names of the optimized (free) parameters, in vector order.
    pub fn param_names(&self) -> Vec<String> {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        match self.kind {
            ModelKind::Garch => s(&["omega", "alpha", "beta"]),
            ModelKind::Gjr => s(&["omega", "alpha", "beta", "tau"]),
            ModelKind::Egarch => s(&["omega", "beta", "tau11", "tau12"]),
            ModelKind::Regarch => {
                let mut names = s(&["omega", "beta", "tau1", "tau2"]);
                let mut block = |p: &str| names.extend((1..=self.k).map(|i| format!("{p}_{i}")));
                block("gamma");
                block("xi");
                if self.free_phi {
                    block("phi");
                }
                block("delta1");
                block("delta2");
                names
            }
        }
    }

    /// Names of the measurement-covariance entries (upper triangle, row-wise).
    pub fn sigma_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.kind == ModelKind::Regarch {
            for i in 1..=self.k {
                for j in i..=self.k {
                    out.push(format!("sigma_{i}{j}"));
                }
            }
        }
        out
    }

    pub fn n_free(&self) -> usize {
        match self.kind {
            ModelKind::Garch => 3,
            ModelKind::Gjr | ModelKind::Egarch => 4,
            ModelKind::Regarch => 4 + self.k * if self.free_phi { 5 } else { 4 },
        }
    }

    /// Parameter count for information criteria, including Σ for REGARCH.
    pub fn n_params(&self) -> usize {
        self.n_free() + self.k * (self.k + 1) / 2 * usize::from(self.kind == ModelKind::Regarch)
    }

    pub fn check_data(&self, data: &AlignedDataset) -> Result<()> {
        if self.kind != ModelKind::Regarch {
            return Ok(());
        }
        if self.k == 0 {
            return Err(Error::Config(
                "REGARCH needs at least one realized measure".into(),
            ));
        }
        if data.n_measures() != self.k {
            return Err(Error::Config(format!(
                "REGARCH-K{} given {} measures",
                self.k,
                data.n_measures()
            )));
        }
        Ok(())
    }

    pub fn to_unconstrained(&self, nat: &[f64]) -> Vec<f64> {
        let mut u = nat.to_vec();
        match self.kind {
            ModelKind::Garch => {
                u[0] = nat[0].ln();
                if self.stationarity {
                    let p = nat[1] + nat[2];
                    u[1] = logit(p);
                    u[2] = logit(nat[1] / p);
                } else {
                    u[1] = nat[1].ln();
                    u[2] = logit(nat[2]);
                }
            }
            ModelKind::Gjr => {
                u[0] = nat[0].ln();
                u[1] = nat[1].ln();
                u[2] = logit(nat[2]);
                u[3] = nat[3].ln();
            }
            ModelKind::Egarch | ModelKind::Regarch => {
                u[1] = logit(nat[1]);
            }
        }
        u
    }

    pub fn to_natural(&self, unc: &[f64]) -> Vec<f64> {
        let mut n = unc.to_vec();
        match self.kind {
            ModelKind::Garch => {
                n[0] = unc[0].exp();
                if self.stationarity {
                    let p = logistic(unc[1]);
                    let s = logistic(unc[2]);
                    n[1] = p * s;
                    n[2] = p * (1.0 - s);
                } else {
                    n[1] = unc[1].exp();
                    n[2] = logistic(unc[2]);
                }
            }
            ModelKind::Gjr => {
                n[0] = unc[0].exp();
                n[1] = unc[1].exp();
                n[2] = logistic(unc[2]);
                n[3] = unc[3].exp();
            }
            ModelKind::Egarch | ModelKind::Regarch => {
                n[1] = logistic(unc[1]);
            }
        }
        n
    }

    /// Assembles typed parameters from a natural vector. `sigma` is required
    /// for REGARCH and ignored otherwise.
    pub fn build(&self, nat: &[f64], sigma: Option<DMatrix<f64>>) -> ModelParams {
        match self.kind {
            ModelKind::Garch => ModelParams::Garch(GarchParams {
                omega: nat[0],
                alpha: nat[1],
                beta: nat[2],
            }),
            ModelKind::Gjr => ModelParams::Gjr(GjrParams {
                omega: nat[0],
                alpha: nat[1],
                beta: nat[2],
                tau: nat[3],
            }),
            ModelKind::Egarch => ModelParams::Egarch(EgarchParams {
                omega: nat[0],
                beta: nat[1],
                tau11: nat[2],
                tau12: nat[3],
            }),
            ModelKind::Regarch => {
                let k = self.k;
                let mut pos = 4;
                let mut take = |n: usize| {
                    let v = nat[pos..pos + n].to_vec();
                    pos += n;
                    v
                };
                let gamma = take(k);
                let xi = take(k);
                let phi = if self.free_phi { take(k) } else { vec![1.0; k] };
                let delta1 = take(k);
                let delta2 = take(k);
                ModelParams::Regarch(RegarchParams {
                    omega: nat[0],
                    beta: nat[1],
                    tau1: nat[2],
                    tau2: nat[3],
                    gamma,
                    xi,
                    phi,
                    delta1,
                    delta2,
                    sigma: sigma.unwrap_or_else(|| DMatrix::identity(k, k)),
                })
            }
        }
    }

    /// Natural free-parameter vector of `params` under this spec.
    pub fn natural_of(&self, params: &ModelParams) -> Result<Vec<f64>> {
        let v = match (self.kind, params) {
            (ModelKind::Garch, ModelParams::Garch(p)) => vec![p.omega, p.alpha, p.beta],
            (ModelKind::Gjr, ModelParams::Gjr(p)) => vec![p.omega, p.alpha, p.beta, p.tau],
            (ModelKind::Egarch, ModelParams::Egarch(p)) => vec![p.omega, p.beta, p.tau11, p.tau12],
            (ModelKind::Regarch, ModelParams::Regarch(p)) if p.k() == self.k => {
                let mut v = vec![p.omega, p.beta, p.tau1, p.tau2];
                v.extend(&p.gamma);
                v.extend(&p.xi);
                if self.free_phi {
                    v.extend(&p.phi);
                }
                v.extend(&p.delta1);
                v.extend(&p.delta2);
                v
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "parameters do not match {}",
                    self.name()
                )))
            }
        };
        Ok(v)
    }

    /// Moment-matched starting values.
    pub fn default_start(&self, data: &AlignedDataset) -> Vec<f64> {
        let r = data.returns().values();
        let v = default_h1(r);
        match self.kind {
            ModelKind::Garch => vec![v * 0.05, 0.05, 0.9],
            ModelKind::Gjr => vec![v * 0.045, 0.03, 0.9, 0.05],
            ModelKind::Egarch => vec![v.ln(), 0.9, -0.05, 0.1],
            ModelKind::Regarch => {
                let k = self.k;
                let mut nat = vec![v.ln(), 0.9, -0.05, 0.05];
                nat.extend(std::iter::repeat_n(0.3 / k as f64, k));
                for lx in data.log_measures() {
                    nat.push(crate::stats::mean(&lx) - v.ln());
                }
                if self.free_phi {
                    nat.extend(std::iter::repeat_n(1.0, k));
                }
                nat.extend(std::iter::repeat_n(0.0, 2 * k));
                nat
            }
        }
    }

    /// Average log-likelihood at natural parameters, `None` when the filter
    /// breaks down. REGARCH uses the Σ-profiled joint likelihood.
    pub fn mean_loglik(&self, nat: &[f64], data: &PreparedData) -> Option<f64> {
        let t = data.r.len() as f64;
        match self.kind {
            ModelKind::Garch | ModelKind::Gjr => {
                let p = match self.build(nat, None) {
                    ModelParams::Garch(g) => GjrParams::from(g),
                    ModelParams::Gjr(g) => g,
                    _ => unreachable!(),
                };
                let (h, _) = gjr_core(&p, &data.r, data.h1).ok()?;
                let s: f64 = h.iter().zip(&data.r).map(|(h, r)| h.ln() + r * r / h).sum();
                Some(-0.5 * (LN_2PI + s / t))
            }
            ModelKind::Egarch => {
                let ModelParams::Egarch(p) = self.build(nat, None) else {
                    unreachable!()
                };
                let (h, _) = egarch_core(&p, &data.r, data.h1.ln()).ok()?;
                let s: f64 = h.iter().zip(&data.r).map(|(h, r)| h.ln() + r * r / h).sum();
                Some(-0.5 * (LN_2PI + s / t))
            }
            ModelKind::Regarch => {
                let ModelParams::Regarch(p) = self.build(nat, None) else {
                    unreachable!()
                };
                if self.stationarity && p.filter_persistence().abs() >= 1.0 {
                    // The filtered path would amplify any error in log h₁.
                    return None;
                }
                let k = self.k;
                let mut uu = vec![0.0; k * k];
                let ret = regarch_profile_sums(&p, &data.r, &data.logx, data.h1.ln(), &mut uu)?;
                let s = DMatrix::from_row_slice(k, k, &uu) / t;
                let logdet = s
                    .cholesky()?
                    .l()
                    .diagonal()
                    .iter()
                    .map(|d| 2.0 * d.ln())
                    .sum::<f64>();
                let k = k as f64;
                let ll = -0.5 * (LN_2PI + ret / t) - 0.5 * (k * LN_2PI + logdet + k);
                ll.is_finite().then_some(ll)
            }
        }
    }

    /// Per-observation joint log-likelihood at the full natural vector
    /// (free parameters followed by the upper triangle of Σ for REGARCH).
    pub(crate) fn loglik_terms(&self, full: &[f64], data: &PreparedData) -> Option<Vec<f64>> {
        let n = self.n_free();
        match self.kind {
            ModelKind::Garch | ModelKind::Gjr => {
                let p = match self.build(full, None) {
                    ModelParams::Garch(g) => GjrParams::from(g),
                    ModelParams::Gjr(g) => g,
                    _ => unreachable!(),
                };
                let (h, _) = gjr_core(&p, &data.r, data.h1).ok()?;
                Some(
                    h.iter()
                        .zip(&data.r)
                        .map(|(h, r)| -0.5 * (LN_2PI + h.ln() + r * r / h))
                        .collect(),
                )
            }
            ModelKind::Egarch => {
                let ModelParams::Egarch(p) = self.build(full, None) else {
                    unreachable!()
                };
                let (h, _) = egarch_core(&p, &data.r, data.h1.ln()).ok()?;
                Some(
                    h.iter()
                        .zip(&data.r)
                        .map(|(h, r)| -0.5 * (LN_2PI + h.ln() + r * r / h))
                        .collect(),
                )
            }
            ModelKind::Regarch => {
                let sigma = sigma_from_vech(&full[n..], self.k);
                let ModelParams::Regarch(p) = self.build(&full[..n], Some(sigma.clone())) else {
                    unreachable!()
                };
                let path = regarch_core(&p, &data.r, &data.logx, data.h1.ln()).ok()?;
                let meas = measurement_loglik_terms(&path.u, &sigma).ok()?;
                Some(
                    path.logh
                        .iter()
                        .zip(&data.r)
                        .zip(&meas)
                        .map(|((lh, r), m)| -0.5 * (LN_2PI + lh + r * r * (-lh).exp()) + m)
                        .collect(),
                )
            }
        }
    }

    /// Profiled Σ (uncentered residual covariance) at natural parameters.
    pub fn profiled_sigma(&self, nat: &[f64], data: &PreparedData) -> Result<DMatrix<f64>> {
        let ModelParams::Regarch(p) = self.build(nat, None) else {
            return Err(Error::InvalidParameter(
                "profiled sigma applies to REGARCH only".into(),
            ));
        };
        let path = regarch_core(&p, &data.r, &data.logx, data.h1.ln())?;
        Ok(residual_covariance(&path.u))
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `(1/T) Σ u_t u_t'`, the Gaussian MLE of Σ for zero-mean residuals.
pub fn residual_covariance(u: &[Vec<f64>]) -> DMatrix<f64> {
    let k = u.len();
    let t = u.first().map_or(0, |r| r.len()) as f64;
    DMatrix::from_fn(k, k, |i, j| {
        u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum::<f64>() / t
    })
}

pub(crate) fn sigma_vech(s: &DMatrix<f64>) -> Vec<f64> {
    let k = s.nrows();
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in i..k {
            out.push(s[(i, j)]);
        }
    }
    out
}

pub(crate) fn sigma_from_vech(v: &[f64], k: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(k, k);
    let mut pos = 0;
    for i in 0..k {
        for j in i..k {
            s[(i, j)] = v[pos];
            s[(j, i)] = v[pos];
            pos += 1;
        }
    }
    s
}

/// Returns, log measures and `h_1` extracted once per fit.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub r: Vec<f64>,
    pub logx: Vec<Vec<f64>>,
    pub h1: f64,
}

impl PreparedData {
    pub fn new(data: &AlignedDataset, h1: Option<f64>) -> Self {
        let r = data.returns().values().to_vec();
        let h1 = h1.unwrap_or_else(|| default_h1(&r));
        Self {
            logx: data.log_measures(),
            r,
            h1,
        }
    }
}

/// Typed parameters of any supported model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Garch(GarchParams),
    Gjr(GjrParams),
    Egarch(EgarchParams),
    Regarch(RegarchParams),
}

impl ModelParams {
    /// Runs the model's filter with `h_1` (default: sample variance of returns).
    pub fn filter(&self, data: &AlignedDataset, h1: Option<f64>) -> Result<FilterOutput> {
        let h1 = h1.unwrap_or_else(|| default_h1(data.returns().values()));
        match self {
            ModelParams::Garch(p) => crate::models::garch_filter(p, data.returns(), h1),
            ModelParams::Gjr(p) => crate::models::gjr_filter(p, data.returns(), h1),
            ModelParams::Egarch(p) => crate::models::egarch_filter(p, data.returns(), h1.ln()),
            ModelParams::Regarch(p) => crate::models::regarch_filter(p, data, h1.ln()),
        }
    }

    /// Variance forecast for the day after the last observation of `data`,
    /// from the filtered terminal state and the model's one-step recursion.
    pub fn forecast_next(&self, data: &AlignedDataset, h1: Option<f64>) -> Result<f64> {
        let out = self.filter(data, h1)?;
        let t = data.len() - 1;
        let r = data.returns().values()[t];
        let h_t = out.h[t];
        let next = match self {
            ModelParams::Garch(p) => GjrParams::from(*p).step(h_t, r),
            ModelParams::Gjr(p) => p.step(h_t, r),
            ModelParams::Egarch(p) => p.step(h_t.ln(), r / h_t.sqrt()).exp(),
            ModelParams::Regarch(p) => {
                let lh = h_t.ln();
                let z = r / (lh / 2.0).exp();
                let logx: Vec<f64> = data.measures().iter().map(|m| m.values()[t].ln()).collect();
                regarch_reduced_recursion(p, lh, z, &logx).exp()
            }
        };
        if !(next.is_finite() && next > 0.0) {
            return Err(Error::NumericalOverflow { index: data.len() });
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regarch_names_and_counts() {
        let s = ModelSpec::regarch(2);
        assert_eq!(s.n_free(), 12);
        assert_eq!(s.n_params(), 15);
        assert_eq!(s.param_names().len(), 12);
        assert_eq!(s.sigma_names(), vec!["sigma_11", "sigma_12", "sigma_22"]);
        assert_eq!(ModelSpec::regarch(1).n_params(), 9);
        assert_eq!(ModelSpec::regarch(1).with_free_phi(true).n_free(), 9);
        assert_eq!(ModelSpec::gjr().n_params(), 4);
    }

    #[test]
    fn build_and_natural_round_trip() {
        let s = ModelSpec::regarch(2).with_free_phi(true);
        let nat: Vec<f64> = (0..s.n_free()).map(|i| 0.1 * i as f64 - 0.3).collect();
        let mut nat = nat;
        nat[1] = 0.9;
        let p = s.build(&nat, Some(DMatrix::identity(2, 2)));
        assert_eq!(s.natural_of(&p).unwrap(), nat);
    }

    #[test]
    fn vech_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[0.234, 0.193, 0.193, 0.183]);
        assert_eq!(sigma_from_vech(&sigma_vech(&m), 2), m);
    }
}
