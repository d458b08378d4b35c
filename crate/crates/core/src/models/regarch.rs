use nalgebra::DMatrix;

use super::{return_loglik_terms, FilterOutput};
use crate::error::{Error, Result};
use crate::series::AlignedDataset;
use crate::stats::LN_2PI;

/// Realized EGARCH with K measures.
///
/// GARCH equation:
/// `log h_{t+1} = ω + β(log h_t − ω) + τ₁ z_t + τ₂(z_t² − 1) + γ·u_t`
///
/// Measurement equations, `k = 1..K`:
/// `log x_{k,t} = ξ_k + φ_k log h_t + δ_{k,1} z_t + δ_{k,2}(z_t² − 1) + u_{k,t}`
/// with `u_t ~ N(0, Σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegarchParams {
    pub omega: f64,
    pub beta: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
    pub sigma: DMatrix<f64>,
}

impl RegarchParams {
    pub fn k(&self) -> usize {
        self.gamma.len()
    }

    /// Coefficient on log h_t in the reduced recursion, `β − Σ γ_k φ_k`.
    pub fn filter_persistence(&self) -> f64 {
        self.beta
            - self
                .gamma
                .iter()
                .zip(&self.phi)
                .map(|(g, f)| g * f)
                .sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(Error::InvalidParameter(
                "REGARCH needs at least one measure".into(),
            ));
        }
        for (name, v) in [
            ("xi", &self.xi),
            ("phi", &self.phi),
            ("delta1", &self.delta1),
            ("delta2", &self.delta2),
        ] {
            if v.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "{name} has length {} but K = {k}",
                    v.len()
                )));
            }
        }
        if self.beta.abs() >= 1.0 || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "REGARCH requires |beta| < 1, got {}",
                self.beta
            )));
        }
        self.check_sigma()?;
        Ok(())
    }

    fn check_sigma(&self) -> Result<()> {
        let k = self.k();
        if self.sigma.nrows() != k || self.sigma.ncols() != k {
            return Err(Error::InvalidParameter(format!(
                "sigma is {}x{} but K = {k}",
                self.sigma.nrows(),
                self.sigma.ncols()
            )));
        }
        if (&self.sigma - self.sigma.transpose()).abs().max()
            > 1e-12 * self.sigma.abs().max().max(1.0)
        {
            return Err(Error::InvalidParameter("sigma is not symmetric".into()));
        }
        if self.sigma.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter(
                "sigma is not positive definite".into(),
            ));
        }
        Ok(())
    }

    /// `(z_t, u_t, log h_{t+1})` from the structural two-equation system.
    pub fn structural_step(&self, logh: f64, r: f64, logx: &[f64]) -> (f64, Vec<f64>, f64) {
        let z = r / (0.5 * logh).exp();
        let z2m1 = z * z - 1.0;
        let u: Vec<f64> = (0..self.k())
            .map(|k| {
                logx[k]
                    - self.xi[k]
                    - self.phi[k] * logh
                    - self.delta1[k] * z
                    - self.delta2[k] * z2m1
            })
            .collect();
        let gu: f64 = self.gamma.iter().zip(&u).map(|(g, u)| g * u).sum();
        let next =
            self.omega + self.beta * (logh - self.omega) + self.tau1 * z + self.tau2 * z2m1 + gu;
        (z, u, next)
    }
}

/// Trajectory of the structural recursion.
#[derive(Debug, Clone)]
pub(crate) struct RegarchPath {
    pub logh: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub logh_next: f64,
}

/// Unchecked structural recursion; `logx` holds K rows of length T.
pub(crate) fn regarch_core(
    p: &RegarchParams,
    r: &[f64],
    logx: &[Vec<f64>],
    logh1: f64,
) -> Result<RegarchPath> {
    let t_len = r.len();
    let k = p.k();
    let mut logh = Vec::with_capacity(t_len);
    let mut zs = Vec::with_capacity(t_len);
    let mut u = vec![Vec::with_capacity(t_len); k];
    let mut lh = logh1;
    for t in 0..t_len {
        if !lh.is_finite() || lh.abs() > 700.0 {
            return Err(Error::NumericalOverflow { index: t });
        }
        logh.push(lh);
        let z = r[t] / (0.5 * lh).exp();
        let z2m1 = z * z - 1.0;
        let mut gu = 0.0;
        for j in 0..k {
            let uj = logx[j][t] - p.xi[j] - p.phi[j] * lh - p.delta1[j] * z - p.delta2[j] * z2m1;
            gu += p.gamma[j] * uj;
            u[j].push(uj);
        }
        zs.push(z);
        lh = p.omega + p.beta * (lh - p.omega) + p.tau1 * z + p.tau2 * z2m1 + gu;
    }
    if !lh.is_finite() || lh.abs() > 700.0 {
        return Err(Error::NumericalOverflow { index: t_len });
    }
    Ok(RegarchPath {
        logh,
        z: zs,
        u,
        logh_next: lh,
    })
}

/// Sufficient statistics of the profiled likelihood without storing the path:
/// returns `Σ_t (log h_t + r_t² / h_t)` and fills `uu` (K×K, row-major) with
/// `Σ_t u_t u_t'`. `None` on the same overflow conditions as [`regarch_core`].
pub(crate) fn regarch_profile_sums(
    p: &RegarchParams,
    r: &[f64],
    logx: &[Vec<f64>],
    logh1: f64,
    uu: &mut [f64],
) -> Option<f64> {
    let k = p.k();
    let mut u = vec![0.0; k];
    uu.iter_mut().for_each(|v| *v = 0.0);
    let mut ret = 0.0;
    let mut lh = logh1;
    for t in 0..r.len() {
        if !lh.is_finite() || lh.abs() > 700.0 {
            return None;
        }
        let inv_sd = (-0.5 * lh).exp();
        let z = r[t] * inv_sd;
        let z2m1 = z * z - 1.0;
        ret += lh + z * z;
        let mut gu = 0.0;
        for j in 0..k {
            u[j] = logx[j][t] - p.xi[j] - p.phi[j] * lh - p.delta1[j] * z - p.delta2[j] * z2m1;
            gu += p.gamma[j] * u[j];
        }
        for i in 0..k {
            for j in i..k {
                uu[i * k + j] += u[i] * u[j];
            }
        }
        lh = p.omega + p.beta * (lh - p.omega) + p.tau1 * z + p.tau2 * z2m1 + gu;
    }
    if !lh.is_finite() || lh.abs() > 700.0 {
        return None;
    }
    for i in 0..k {
        for j in 0..i {
            uu[i * k + j] = uu[j * k + i];
        }
    }
    Some(ret)
}

/// Per-observation `−½(K log 2π + log|Σ| + u_t'Σ⁻¹u_t)`.
pub(crate) fn measurement_loglik_terms(u: &[Vec<f64>], sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let k = u.len();
    let t_len = u.first().map_or(0, |r| r.len());
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("sigma is not positive definite".into()))?;
    let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let inv = chol.inverse();
    let c = -0.5 * (k as f64 * LN_2PI + logdet);
    let mut out = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let mut q = 0.0;
        for i in 0..k {
            for j in 0..k {
                q += u[i][t] * inv[(i, j)] * u[j][t];
            }
        }
        out.push(c - 0.5 * q);
    }
    Ok(out)
}

/// Runs the observation-driven REGARCH recursion over `data`.
pub fn regarch_filter(
    params: &RegarchParams,
    data: &AlignedDataset,
    logh1: f64,
) -> Result<FilterOutput> {
    params.validate()?;
    if data.n_measures() != params.k() {
        return Err(Error::InvalidParameter(format!(
            "dataset has {} measures but parameters have K = {}",
            data.n_measures(),
            params.k()
        )));
    }
    if !logh1.is_finite() {
        return Err(Error::InvalidParameter("log h1 must be finite".into()));
    }
    let r = data.returns().values();
    let path = regarch_core(params, r, &data.log_measures(), logh1)?;
    let h: Vec<f64> = path.logh.iter().map(|l| l.exp()).collect();
    let ret_terms: Vec<f64> = return_loglik_terms(&h, r).collect();
    let meas_terms = measurement_loglik_terms(&path.u, &params.sigma)?;
    let loglik_return: f64 = ret_terms.iter().sum();
    let loglik_measurement: f64 = meas_terms.iter().sum();
    let loglik_terms = ret_terms
        .iter()
        .zip(&meas_terms)
        .map(|(a, b)| a + b)
        .collect();
    Ok(FilterOutput {
        h,
        z: path.z,
        u: path.u,
        loglik_return,
        loglik_measurement,
        loglik_joint: loglik_return + loglik_measurement,
        loglik_terms,
        h_next: path.logh_next.exp(),
    })
}

/// One step of the reduced form obtained by substituting the measurement
/// equations into the GARCH equation:
///
/// `log h_t = ω(1−β) + Σγ_k(log x_{k,t−1} − ξ_k) + (β − Σγ_kφ_k) log h_{t−1}
///          + (τ₁ − Σγ_kδ_{k,1}) z_{t−1} + (τ₂ − Σγ_kδ_{k,2})(z²_{t−1} − 1)`.
pub fn regarch_reduced_recursion(
    params: &RegarchParams,
    logh_prev: f64,
    z_prev: f64,
    logx_prev: &[f64],
) -> f64 {
    let mut level = params.omega * (1.0 - params.beta);
    let mut persistence = params.beta;
    let mut lev1 = params.tau1;
    let mut lev2 = params.tau2;
    for k in 0..params.k() {
        let g = params.gamma[k];
        level += g * (logx_prev[k] - params.xi[k]);
        persistence -= g * params.phi[k];
        lev1 -= g * params.delta1[k];
        lev2 -= g * params.delta2[k];
    }
    level + persistence * logh_prev + lev1 * z_prev + lev2 * (z_prev * z_prev - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{DailyReturnSeries, Date, MeasureKind, RealizedMeasureSeries};

    fn params_k1(omega: f64, beta: f64, tau1: f64, tau2: f64, gamma: f64) -> RegarchParams {
        RegarchParams {
            omega,
            beta,
            tau1,
            tau2,
            gamma: vec![gamma],
            xi: vec![0.0],
            phi: vec![1.0],
            delta1: vec![0.0],
            delta2: vec![0.0],
            sigma: DMatrix::from_element(1, 1, 0.25),
        }
    }

    fn dataset(r: &[f64], x: &[f64]) -> AlignedDataset {
        let rs = DailyReturnSeries::from_values(r.to_vec()).unwrap();
        let dates: Vec<Date> = rs.dates().to_vec();
        let m = RealizedMeasureSeries::new(dates, x.to_vec(), MeasureKind::Rv).unwrap();
        crate::series::align(&rs, &[m], crate::series::AlignPolicy::Strict).unwrap()
    }

    #[test]
    fn decoupled_fixed_point() {
        let p = params_k1(0.2, 0.9, 0.0, 0.0, 0.0);
        let data = dataset(&[1.0, -0.5, 2.0], &[1.5, 0.7, 3.0]);
        let out = regarch_filter(&p, &data, 0.2).unwrap();
        for (t, h) in out.h.iter().enumerate() {
            assert!((h.ln() - 0.2).abs() < 1e-15);
            let raw = data.measures()[0].values()[t].ln() - 0.2;
            assert!((out.u[0][t] - raw).abs() < 1e-15);
        }
    }

    #[test]
    fn three_step_hand_recursion() {
        // K = 1, φ = 1, ξ = 0, δ = 0, γ = 1, β = 0:
        // log h_{t+1} = ω + τ₁z_t + τ₂(z_t² − 1) + (log x_t − log h_t).
        let (omega, tau1, tau2) = (0.1, -0.2, 0.05);
        let p = params_k1(omega, 0.0, tau1, tau2, 1.0);
        let r = [0.8, -1.3, 0.4];
        let x = [0.9, 2.1, 0.5];
        let data = dataset(&r, &x);
        let out = regarch_filter(&p, &data, 0.0).unwrap();

        let mut lh = 0.0f64;
        let mut expected = vec![];
        for t in 0..3 {
            expected.push(lh);
            let z = r[t] / (lh / 2.0).exp();
            lh = omega + tau1 * z + tau2 * (z * z - 1.0) + (x[t].ln() - lh);
        }
        for t in 0..3 {
            assert!((out.h[t].ln() - expected[t]).abs() < 1e-14);
        }
        assert!((out.h_next.ln() - lh).abs() < 1e-14);
    }

    #[test]
    fn joint_likelihood_decomposes() {
        let mut p = params_k1(0.3, 0.8, -0.1, 0.05, 0.3);
        p.xi = vec![-0.4];
        p.delta1 = vec![-0.1];
        let data = dataset(&[0.5, -1.0, 1.7, -0.2], &[0.6, 1.4, 2.2, 0.4]);
        let out = regarch_filter(&p, &data, 0.1).unwrap();
        assert_eq!(out.loglik_joint, out.loglik_return + out.loglik_measurement);
        let s: f64 = out.loglik_terms.iter().sum();
        assert!((s - out.loglik_joint).abs() < 1e-12);
    }

    #[test]
    fn nested_reduction_without_gamma() {
        let p = RegarchParams {
            omega: 0.4,
            beta: 0.85,
            tau1: -0.1,
            tau2: 0.07,
            gamma: vec![0.0, 0.0],
            xi: vec![-1.0, -3.0],
            phi: vec![1.0, 1.0],
            delta1: vec![-0.1, -0.12],
            delta2: vec![0.1, 0.09],
            sigma: DMatrix::identity(2, 2),
        };
        let (lh, z) = (0.3, -0.7);
        let got = regarch_reduced_recursion(&p, lh, z, &[0.5, -2.0]);
        let want = 0.4 * 0.15 + 0.85 * lh - 0.1 * z + 0.07 * (z * z - 1.0);
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn table_parameters_term_by_term() {
        let p = RegarchParams {
            omega: 0.477,
            beta: 0.927,
            tau1: -0.116,
            tau2: 0.058,
            gamma: vec![-0.082, 0.453],
            xi: vec![-1.229, -3.079],
            phi: vec![1.0, 1.0],
            delta1: vec![-0.126, -0.120],
            delta2: vec![0.102, 0.088],
            sigma: DMatrix::from_row_slice(2, 2, &[0.234, 0.193, 0.193, 0.183]),
        };
        let got = regarch_reduced_recursion(&p, 0.0, 0.0, &[0.0, 0.0]);
        // ω(1−β) − Σγξ − (τ₂ − Σγδ₂), every other term vanishes at these inputs.
        let level = 0.477 * (1.0 - 0.927);
        let meas = -(-0.082 * -1.229) - 0.453 * -3.079;
        let lev2 = 0.058 - (-0.082 * 0.102 + 0.453 * 0.088);
        let want = level + meas - lev2;
        assert!((got - want).abs() < 1e-14);
        assert!((got - 1.302_330_2).abs() < 1e-6, "{got}");
        // Structural step agrees.
        let (_, _, next) = p.structural_step(0.0, 0.0, &[0.0, 0.0]);
        assert!((next - got).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sigma() {
        let mut p = params_k1(0.0, 0.9, 0.0, 0.0, 0.1);
        p.sigma = DMatrix::from_element(1, 1, -1.0);
        assert!(p.validate().is_err());
        p.sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(p.validate().is_err());
    }
}
