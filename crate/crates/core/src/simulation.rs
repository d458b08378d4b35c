//! Synthetic data: daily-model simulators, an intraday log-price simulator
//! and Monte Carlo calibration of the range constant λ₂,ₘ.
//!
//! All generators are `ChaCha8Rng`. Daily models draw from a single stream
//! seeded with `seed`. Intraday paths use one stream per day: day `d` uses
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(d)`, so any day can be
//! regenerated on its own.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{realized_range_volatility, realized_variance, RangeScaling};
use crate::models::{EgarchParams, GarchParams, GjrParams, RegarchParams};
use crate::series::{
    align, AlignPolicy, AlignedDataset, Bar, DailyReturnSeries, Date, IntradayGrid, MeasureKind,
    RealizedMeasureSeries,
};

/// Data-generating process. Daily models are in percent / percent² units;
/// intraday diffusions take `mu` in percent per day and volatility in
/// percent per √day (σ = 1 gives a daily integrated variance of 1 percent²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Dgp {
    Garch {
        omega: f64,
        alpha: f64,
        beta: f64,
    },
    Gjr {
        omega: f64,
        alpha: f64,
        beta: f64,
        tau: f64,
    },
    Egarch {
        omega: f64,
        beta: f64,
        tau11: f64,
        tau12: f64,
    },
    Regarch {
        omega: f64,
        beta: f64,
        tau1: f64,
        tau2: f64,
        gamma: Vec<f64>,
        xi: Vec<f64>,
        /// Defaults to 1 for every measure.
        #[serde(default)]
        phi: Option<Vec<f64>>,
        delta1: Vec<f64>,
        delta2: Vec<f64>,
        /// Measurement covariance, row by row.
        sigma: Vec<Vec<f64>>,
        /// Labels for the emitted measures; defaults to rv, rrv, rk.
        #[serde(default)]
        kinds: Option<Vec<MeasureKind>>,
    },
    Brownian {
        #[serde(default)]
        mu: f64,
        sigma: f64,
    },
    /// Square-root variance `dv = κ(θ − v)dt + η√v dB` with `corr(dB, dW) = ρ`,
    /// `v` in percent² per day.
    HestonLike {
        #[serde(default)]
        mu: f64,
        v0: f64,
        kappa: f64,
        theta: f64,
        eta: f64,
        rho: f64,
    },
}

impl Dgp {
    pub fn from_regarch(params: &RegarchParams) -> Self {
        let k = params.k();
        Dgp::Regarch {
            omega: params.omega,
            beta: params.beta,
            tau1: params.tau1,
            tau2: params.tau2,
            gamma: params.gamma.clone(),
            xi: params.xi.clone(),
            phi: Some(params.phi.clone()),
            delta1: params.delta1.clone(),
            delta2: params.delta2.clone(),
            sigma: (0..k)
                .map(|i| (0..k).map(|j| params.sigma[(i, j)]).collect())
                .collect(),
            kinds: None,
        }
    }

    pub fn is_daily(&self) -> bool {
        !matches!(self, Dgp::Brownian { .. } | Dgp::HestonLike { .. })
    }

    /// Typed REGARCH parameters, validated.
    pub fn regarch_params(&self) -> Result<RegarchParams> {
        let Dgp::Regarch {
            omega,
            beta,
            tau1,
            tau2,
            gamma,
            xi,
            phi,
            delta1,
            delta2,
            sigma,
            ..
        } = self
        else {
            return Err(Error::Config("not a regarch process".into()));
        };
        let k = gamma.len();
        if sigma.len() != k || sigma.iter().any(|row| row.len() != k) {
            return Err(Error::Config(format!("sigma must be {k}x{k}")));
        }
        let p = RegarchParams {
            omega: *omega,
            beta: *beta,
            tau1: *tau1,
            tau2: *tau2,
            gamma: gamma.clone(),
            xi: xi.clone(),
            phi: phi.clone().unwrap_or_else(|| vec![1.0; k]),
            delta1: delta1.clone(),
            delta2: delta2.clone(),
            sigma: DMatrix::from_fn(k, k, |i, j| sigma[i][j]),
        };
        p.validate()?;
        Ok(p)
    }

    fn measure_kinds(&self) -> Result<Vec<MeasureKind>> {
        let Dgp::Regarch { gamma, kinds, .. } = self else {
            return Ok(Vec::new());
        };
        let k = gamma.len();
        match kinds {
            Some(v) if v.len() == k => Ok(v.clone()),
            Some(v) => Err(Error::Config(format!(
                "{} measure kinds for K = {k}",
                v.len()
            ))),
            None if k <= 3 => {
                Ok([MeasureKind::Rv, MeasureKind::Rrv, MeasureKind::Rk][..k].to_vec())
            }
            None => Err(Error::Config(format!(
                "K = {k} needs explicit measure kinds"
            ))),
        }
    }
}

fn default_n() -> usize {
    78
}

fn default_one() -> usize {
    1
}

fn default_interval() -> u32 {
    300
}

fn default_burn_in() -> usize {
    250
}

/// Simulation settings; also the schema of the `simulate` TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub days: usize,
    /// Bars per day (intraday processes).
    #[serde(default = "default_n")]
    pub n: usize,
    /// Fine-grid steps per bar (intraday processes).
    #[serde(default = "default_one")]
    pub m: usize,
    /// Std of additive Gaussian noise on observed log prices, natural-log units.
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default = "default_interval")]
    pub interval_seconds: u32,
    /// Days simulated and discarded before the sample (daily models).
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub dgp: Dgp,
}

impl SimConfig {
    pub fn new(seed: u64, days: usize, dgp: Dgp) -> Self {
        Self {
            seed,
            days,
            n: default_n(),
            m: 1,
            noise_std: 0.0,
            interval_seconds: default_interval(),
            burn_in: default_burn_in(),
            dgp,
        }
    }

    pub fn with_grid(mut self, n: usize, m: usize) -> Self {
        self.n = n;
        self.m = m;
        self
    }

    pub fn with_noise(mut self, noise_std: f64) -> Self {
        self.noise_std = noise_std;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.days == 0 || self.n == 0 || self.m == 0 {
            return Err(Error::Config("days, n and m must all be at least 1".into()));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config(format!(
                "noise_std must be nonnegative, got {}",
                self.noise_std
            )));
        }
        if self.interval_seconds == 0 {
            return Err(Error::Config("interval_seconds must be positive".into()));
        }
        Ok(())
    }
}

/// Simulated sample. `true_h` is the conditional variance for daily models
/// and the integrated variance for intraday processes.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub returns: DailyReturnSeries,
    pub true_h: Vec<f64>,
    /// Measurement-equation series (REGARCH only).
    pub measures: Vec<RealizedMeasureSeries>,
    pub grids: Option<Vec<IntradayGrid>>,
    pub iv: Option<Vec<f64>>,
    pub iq: Option<Vec<f64>>,
}

impl SimOutput {
    pub fn dates(&self) -> &[Date] {
        self.returns.dates()
    }

    /// Returns together with every simulated measure.
    pub fn dataset(&self) -> Result<AlignedDataset> {
        align(&self.returns, &self.measures, AlignPolicy::Strict)
    }

    pub fn true_variance_series(&self) -> Result<RealizedMeasureSeries> {
        RealizedMeasureSeries::new(
            self.dates().to_vec(),
            self.true_h.clone(),
            MeasureKind::Proxy,
        )
    }
}

/// Dispatches to [`simulate_model`] or [`simulate_intraday`].
pub fn simulate(config: &SimConfig) -> Result<SimOutput> {
    if config.dgp.is_daily() {
        simulate_model(config)
    } else {
        simulate_intraday(config)
    }
}

fn dates(days: usize) -> Vec<Date> {
    (0..days).map(Date::from_index).collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Daily-model simulation with exact recursions. The variance starts at its
/// unconditional level (or `exp(ω)` for log models) and runs `burn_in` days
/// before the sample.
pub fn simulate_model(config: &SimConfig) -> Result<SimOutput> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let total = config.burn_in + config.days;
    let mut r = Vec::with_capacity(total);
    let mut h = Vec::with_capacity(total);
    let mut logx: Vec<Vec<f64>> = Vec::new();

    match &config.dgp {
        Dgp::Garch { omega, alpha, beta } => {
            let p = GjrParams::from(GarchParams::new(*omega, *alpha, *beta)?);
            simulate_gjr(&p, total, &mut rng, &mut r, &mut h)?;
        }
        Dgp::Gjr {
            omega,
            alpha,
            beta,
            tau,
        } => {
            let p = GjrParams::new(*omega, *alpha, *beta, *tau)?;
            simulate_gjr(&p, total, &mut rng, &mut r, &mut h)?;
        }
        Dgp::Egarch {
            omega,
            beta,
            tau11,
            tau12,
        } => {
            let p = EgarchParams::new(*omega, *beta, *tau11, *tau12)?;
            let mut lh = p.omega;
            for t in 0..total {
                let z = normal(&mut rng);
                h.push(lh.exp());
                r.push((0.5 * lh).exp() * z);
                lh = p.step(lh, z);
                check_state(lh, t)?;
            }
        }
        Dgp::Regarch { .. } => {
            let p = config.dgp.regarch_params()?;
            let k = p.k();
            let chol = p.sigma.clone().cholesky().expect("validated").l();
            logx = vec![Vec::with_capacity(total); k];
            let mut lh = p.omega;
            let mut e = vec![0.0; k];
            for t in 0..total {
                let z = normal(&mut rng);
                e.iter_mut().for_each(|v| *v = normal(&mut rng));
                let u: Vec<f64> = (0..k)
                    .map(|i| (0..=i).map(|j| chol[(i, j)] * e[j]).sum())
                    .collect();
                let z2m1 = z * z - 1.0;
                for i in 0..k {
                    logx[i].push(
                        p.xi[i] + p.phi[i] * lh + p.delta1[i] * z + p.delta2[i] * z2m1 + u[i],
                    );
                }
                h.push(lh.exp());
                r.push((0.5 * lh).exp() * z);
                let gu: f64 = p.gamma.iter().zip(&u).map(|(g, u)| g * u).sum();
                lh = p.omega + p.beta * (lh - p.omega) + p.tau1 * z + p.tau2 * z2m1 + gu;
                check_state(lh, t)?;
            }
        }
        _ => {
            return Err(Error::Config(
                "intraday process passed to simulate_model".into(),
            ))
        }
    }

    let skip = config.burn_in;
    let dates = dates(config.days);
    let returns = DailyReturnSeries::new(dates.clone(), r[skip..].to_vec())?;
    let kinds = config.dgp.measure_kinds()?;
    let measures = logx
        .iter()
        .zip(kinds)
        .map(|(lx, kind)| {
            RealizedMeasureSeries::new(
                dates.clone(),
                lx[skip..].iter().map(|v| v.exp()).collect(),
                kind,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimOutput {
        returns,
        true_h: h[skip..].to_vec(),
        measures,
        grids: None,
        iv: None,
        iq: None,
    })
}

fn check_state(logh: f64, index: usize) -> Result<()> {
    if logh.is_finite() && logh.abs() < 700.0 {
        Ok(())
    } else {
        Err(Error::NumericalOverflow { index })
    }
}

fn simulate_gjr(
    p: &GjrParams,
    total: usize,
    rng: &mut ChaCha8Rng,
    r: &mut Vec<f64>,
    h: &mut Vec<f64>,
) -> Result<()> {
    let persistence = p.alpha + p.beta + 0.5 * p.tau;
    let mut ht = if persistence < 1.0 {
        p.omega / (1.0 - persistence)
    } else {
        p.omega / (1.0 - p.beta)
    };
    for t in 0..total {
        let z = normal(rng);
        let rt = ht.sqrt() * z;
        h.push(ht);
        r.push(rt);
        ht = p.step(ht, rt);
        if !(ht.is_finite() && ht > 0.0) {
            return Err(Error::NumericalOverflow { index: t });
        }
    }
    Ok(())
}

/// Euler simulation of the intraday log price on `n·m` fine steps per day.
///
/// Bars aggregate `m` consecutive steps: open is the previous bar's close,
/// high and low are extremes over the bar's `m + 1` observed points. Days
/// are contiguous, so daily returns are close-to-close. IV and IQ are
/// Riemann sums of σ² and σ⁴ over the fine grid, in percent² and percent⁴.
pub fn simulate_intraday(config: &SimConfig) -> Result<SimOutput> {
    config.validate()?;
    let (n, m) = (config.n, config.m);
    let steps = n * m;
    let dt = 1.0 / steps as f64;
    let sqdt = dt.sqrt();

    let mut variance = match &config.dgp {
        Dgp::Brownian { sigma, .. } if sigma.is_finite() && *sigma > 0.0 => sigma * sigma,
        Dgp::Brownian { sigma, .. } => {
            return Err(Error::Config(format!(
                "sigma must be positive, got {sigma}"
            )))
        }
        Dgp::HestonLike {
            v0,
            kappa,
            theta,
            eta,
            rho,
            ..
        } => {
            if !(*v0 > 0.0 && *kappa >= 0.0 && *theta > 0.0 && *eta >= 0.0 && rho.abs() <= 1.0) {
                return Err(Error::Config(
                    "heston-like needs v0, theta > 0, kappa, eta ≥ 0, |rho| ≤ 1".into(),
                ));
            }
            *v0
        }
        _ => {
            return Err(Error::Config(
                "daily model passed to simulate_intraday".into(),
            ))
        }
    };

    let mut p = (100.0f64).ln();
    let mut returns = Vec::with_capacity(config.days);
    let mut iv = Vec::with_capacity(config.days);
    let mut iq = Vec::with_capacity(config.days);
    let mut grids = Vec::with_capacity(config.days);
    let mut observed = vec![0.0; steps + 1];

    for day in 0..config.days {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(day as u64);
        let p_open = p;
        let mut day_iv = 0.0;
        let mut day_iq = 0.0;
        observed[0] = p + noise(&mut rng, config.noise_std);
        for s in 1..=steps {
            let dw = normal(&mut rng) * sqdt;
            let (mu, v) = match &config.dgp {
                Dgp::Brownian { mu, .. } => (*mu, variance),
                Dgp::HestonLike {
                    mu,
                    kappa,
                    theta,
                    eta,
                    rho,
                    ..
                } => {
                    let vp = variance.max(0.0);
                    let db = rho * dw + (1.0 - rho * rho).sqrt() * normal(&mut rng) * sqdt;
                    variance += kappa * (theta - vp) * dt + eta * vp.sqrt() * db;
                    (*mu, vp)
                }
                _ => unreachable!(),
            };
            p += mu / 100.0 * dt + v.sqrt() / 100.0 * dw;
            day_iv += v * dt;
            day_iq += v * v * dt;
            observed[s] = p + noise(&mut rng, config.noise_std);
        }
        let bars: Vec<Bar> = (0..n)
            .map(|i| {
                let seg = &observed[i * m..=(i + 1) * m];
                let (lo, hi) = seg
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                        (a.min(x), b.max(x))
                    });
                Bar::new(seg[0], hi, lo, seg[m])
            })
            .collect();
        grids.push(IntradayGrid::new(
            Date::from_index(day),
            bars,
            config.interval_seconds,
        )?);
        returns.push(100.0 * (p - p_open));
        iv.push(day_iv);
        iq.push(day_iq);
    }

    let returns = DailyReturnSeries::new(dates(config.days), returns)?;
    Ok(SimOutput {
        returns,
        true_h: iv.clone(),
        measures: Vec::new(),
        grids: Some(grids),
        iv: Some(iv),
        iq: Some(iq),
    })
}

fn noise(rng: &mut ChaCha8Rng, std: f64) -> f64 {
    if std > 0.0 {
        std * normal(rng)
    } else {
        0.0
    }
}

/// Fine-grid steps used for continuous monitoring.
pub const CONTINUOUS_STEPS: usize = 10_000;

/// Monte Carlo estimate of λ₂,ₘ = E[S²], the second moment of the range of a
/// standard Brownian motion on `[0, 1]` observed at `m + 1` equidistant
/// points (`m = None`: continuously). Returns the estimate and its standard
/// error.
///
/// For continuous monitoring the path is drawn on [`CONTINUOUS_STEPS`] steps
/// and, in every step whose endpoints come close to the running extremes,
/// the maximum and minimum of the Brownian bridge between the endpoints are
/// sampled exactly. This removes the downward bias of a discrete grid.
pub fn calibrate_lambda(m: Option<u32>, reps: usize, seed: u64) -> Result<(f64, f64)> {
    if reps < 1000 {
        return Err(Error::InvalidParameter(format!(
            "calibration needs at least 1000 replications, got {reps}"
        )));
    }
    if m == Some(0) {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = m.map_or(CONTINUOUS_STEPS, |m| m as usize);
    let sqdt = (1.0 / steps as f64).sqrt();
    let mut path = vec![0.0; steps + 1];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..reps {
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for s in 1..=steps {
            let x = path[s - 1] + normal(&mut rng) * sqdt;
            path[s] = x;
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if m.is_none() {
            (lo, hi) = refine_extremes(&path, lo, hi, sqdt * sqdt, &mut rng);
        }
        let s2 = (hi - lo) * (hi - lo);
        sum += s2;
        sum_sq += s2 * s2;
    }
    let n = reps as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Exact bridge extremes in the steps that can still move the path's range.
/// A bridge over `dt` exceeds its higher endpoint by `x` with probability
/// `exp(−2x(x + |b − a|)/dt)`, so steps more than 8√dt inside the grid
/// extremes are skipped.
fn refine_extremes(path: &[f64], lo: f64, hi: f64, dt: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let margin = 8.0 * dt.sqrt();
    let (mut new_lo, mut new_hi) = (lo, hi);
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d2 = (b - a) * (b - a);
        if a.max(b) > hi - margin {
            let u: f64 = 1.0 - rng.random::<f64>();
            new_hi = new_hi.max(0.5 * (a + b + (d2 - 2.0 * dt * u.ln()).sqrt()));
        }
        if a.min(b) < lo + margin {
            let u: f64 = 1.0 - rng.random::<f64>();
            new_lo = new_lo.min(0.5 * (a + b - (d2 - 2.0 * dt * u.ln()).sqrt()));
        }
    }
    (new_lo, new_hi)
}

/// Monte Carlo efficiency of RV against RRV across simulated days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub var_rv: f64,
    pub var_rrv: f64,
    /// `var_rv / var_rrv`.
    pub ratio: f64,
    /// `n · var_rrv / σ⁴`.
    pub lambda_hat: f64,
    /// `n · var_rv / (2 IQ)`.
    pub rv_ratio: f64,
    /// λ₂,ₘ used for the range.
    pub lambda2m: f64,
}

/// Replications used to calibrate λ₂,ₘ inside [`efficiency_report`].
pub const EFFICIENCY_CALIBRATION_REPS: usize = 200_000;

/// Variances of daily RV and RRV on a constant-σ Brownian simulation. The
/// range is scaled by λ₂,ₘ calibrated for the configured `m` (exactly 1 when
/// `m = 1`).
pub fn efficiency_report(config: &SimConfig) -> Result<EfficiencyReport> {
    if !matches!(config.dgp, Dgp::Brownian { .. }) {
        return Err(Error::Config(
            "efficiency report needs a brownian process".into(),
        ));
    }
    let lambda2m = if config.m == 1 {
        1.0
    } else {
        calibrate_lambda(
            Some(config.m as u32),
            EFFICIENCY_CALIBRATION_REPS,
            config.seed ^ 0x5eed,
        )?
        .0
    };
    let out = simulate_intraday(config)?;
    efficiency_from_output(&out, config.n, config.m, lambda2m)
}

/// [`efficiency_report`] on an existing simulation.
pub fn efficiency_from_output(
    out: &SimOutput,
    n: usize,
    m: usize,
    lambda2m: f64,
) -> Result<EfficiencyReport> {
    let grids = out
        .grids
        .as_ref()
        .ok_or_else(|| Error::Config("simulation has no intraday grids".into()))?;
    let iq = out.iq.as_ref().expect("intraday output carries IQ");
    let scaling = RangeScaling::new(lambda2m, Some(m as u32))?;
    let rv = grids
        .iter()
        .map(realized_variance)
        .collect::<Result<Vec<_>>>()?;
    let rrv = grids
        .iter()
        .map(|g| realized_range_volatility(g, &scaling))
        .collect::<Result<Vec<_>>>()?;
    let var_rv = crate::stats::sample_variance(&rv);
    let var_rrv = crate::stats::sample_variance(&rrv);
    let mean_iq = crate::stats::mean(iq);
    let nf = n as f64;
    Ok(EfficiencyReport {
        var_rv,
        var_rrv,
        ratio: var_rv / var_rrv,
        lambda_hat: nf * var_rrv / mean_iq,
        rv_ratio: nf * var_rv / (2.0 * mean_iq),
        lambda2m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regarch_dgp(gamma: f64, tau: f64) -> Dgp {
        Dgp::Regarch {
            omega: 0.4,
            beta: 0.9,
            tau1: tau,
            tau2: tau,
            gamma: vec![gamma],
            xi: vec![-0.5],
            phi: None,
            delta1: vec![-0.1],
            delta2: vec![0.1],
            sigma: vec![vec![0.2]],
            kinds: None,
        }
    }

    #[test]
    fn regarch_fixed_point_without_shocks() {
        let out = simulate_model(&SimConfig::new(3, 200, regarch_dgp(0.0, 0.0))).unwrap();
        assert!(out.true_h.iter().all(|h| (h - 0.4f64.exp()).abs() < 1e-12));
        assert_eq!(out.measures.len(), 1);
        assert_eq!(out.measures[0].kind(), MeasureKind::Rv);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = SimConfig::new(11, 300, regarch_dgp(0.3, -0.1));
        let a = simulate_model(&cfg).unwrap();
        let b = simulate_model(&cfg).unwrap();
        assert_eq!(a.returns, b.returns);
        assert_eq!(a.measures, b.measures);
        let c = simulate_model(&SimConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.returns, c.returns);
    }

    #[test]
    fn brownian_constant_sigma_iv() {
        let cfg = SimConfig::new(
            1,
            20,
            Dgp::Brownian {
                mu: 0.0,
                sigma: 1.0,
            },
        )
        .with_grid(13, 4);
        let out = simulate_intraday(&cfg).unwrap();
        for (iv, iq) in out.iv.unwrap().iter().zip(out.iq.unwrap()) {
            assert!((iv - 1.0).abs() < 1e-12);
            assert!((iq - 1.0).abs() < 1e-12);
        }
        let grids = out.grids.unwrap();
        assert_eq!(grids[0].len(), 13);
        // Day returns equal the sum of the intraday returns.
        let sum: f64 = grids[5].returns().iter().sum();
        assert!((100.0 * sum - out.returns.values()[5]).abs() < 1e-9);
    }

    #[test]
    fn per_day_streams_are_independent_of_sample_length() {
        let cfg = SimConfig::new(
            5,
            10,
            Dgp::Brownian {
                mu: 0.0,
                sigma: 1.0,
            },
        )
        .with_grid(6, 2);
        let short = simulate_intraday(&cfg).unwrap();
        let long = simulate_intraday(&SimConfig { days: 20, ..cfg }).unwrap();
        assert_eq!(short.returns.values(), &long.returns.values()[..10]);
    }

    #[test]
    fn unit_monitoring_constant_is_one() {
        let (l, se) = calibrate_lambda(Some(1), 20_000, 2).unwrap();
        assert!((l - 1.0).abs() < 4.0 * se, "{l} ± {se}");
    }

    #[test]
    fn calibration_rejects_few_reps() {
        assert!(calibrate_lambda(None, 10, 0).is_err());
    }

    #[test]
    fn config_parses_from_toml() {
        let text = r#"
            seed = 7
            days = 100
            [dgp]
            kind = "regarch"
            omega = 0.4
            beta = 0.9
            tau1 = -0.1
            tau2 = 0.05
            gamma = [0.3, 0.1]
            xi = [-1.0, -3.0]
            delta1 = [-0.1, -0.1]
            delta2 = [0.1, 0.1]
            sigma = [[0.23, 0.19], [0.19, 0.18]]
            kinds = ["rv", "rrv"]
        "#;
        let cfg: SimConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.n, 78);
        let out = simulate(&cfg).unwrap();
        assert_eq!(out.measures.len(), 2);
        assert_eq!(out.measures[1].kind(), MeasureKind::Rrv);
    }
}
