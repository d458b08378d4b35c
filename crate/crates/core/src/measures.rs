//! Realized measures built from intraday bars and the bias-adjusted proxy.
//!
//! Intraday arithmetic is carried out in natural-log units and converted to
//! percent² (×100²) when a value leaves this module. Values that come out
//! exactly zero are floored at [`EPS_FLOOR`] so that `log x` stays defined.

use crate::error::{Error, Result};
use crate::series::{DailyReturnSeries, Date, IntradayGrid, MeasureKind, RealizedMeasureSeries};

/// Floor applied to zero-valued measures, in percent².
pub const EPS_FLOOR: f64 = 1e-12;

/// Natural-log² to percent².
pub const PERCENT2: f64 = 1e4;

/// Default λ₂,ₘ used for the realized range.
pub const DEFAULT_LAMBDA2M: f64 = 2.0;

/// Second moment of the standard Brownian range under continuous monitoring.
pub const LAMBDA2_CONTINUOUS: f64 = 4.0 * std::f64::consts::LN_2;

fn floor(v: f64, what: &str) -> f64 {
    if v < EPS_FLOOR {
        log::debug!("{what} value {v:e} floored at {EPS_FLOOR:e}");
        EPS_FLOOR
    } else {
        v
    }
}

/// Normalization of the squared range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeScaling {
    lambda2m: f64,
    /// Price observations per bar; `None` means continuous monitoring.
    m: Option<u32>,
}

impl RangeScaling {
    pub fn new(lambda2m: f64, m: Option<u32>) -> Result<Self> {
        if !(lambda2m.is_finite() && lambda2m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda2m must be positive, got {lambda2m}"
            )));
        }
        if m.is_none() && lambda2m > LAMBDA2_CONTINUOUS + 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "lambda2m {lambda2m} exceeds the continuous-monitoring limit 4 ln 2"
            )));
        }
        if m == Some(0) {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        Ok(Self { lambda2m, m })
    }

    pub fn lambda2m(&self) -> f64 {
        self.lambda2m
    }

    pub fn m(&self) -> Option<u32> {
        self.m
    }
}

impl Default for RangeScaling {
    fn default() -> Self {
        Self {
            lambda2m: DEFAULT_LAMBDA2M,
            m: None,
        }
    }
}

/// Scale factor ĉ turning open-hours RK into a close-to-close proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyAdjustment {
    c_hat: f64,
}

impl ProxyAdjustment {
    pub fn new(c_hat: f64) -> Result<Self> {
        if !(c_hat.is_finite() && c_hat > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c_hat must be positive, got {c_hat}"
            )));
        }
        Ok(Self { c_hat })
    }

    pub fn c_hat(&self) -> f64 {
        self.c_hat
    }
}

pub fn squared_return(returns: &DailyReturnSeries) -> RealizedMeasureSeries {
    let values = returns
        .values()
        .iter()
        .map(|r| floor(r * r, "squared return"))
        .collect();
    RealizedMeasureSeries::new(returns.dates().to_vec(), values, MeasureKind::SquaredReturn)
        .expect("squared returns are positive after flooring")
}

/// Sum of squared intraday log returns in natural-log units, no floor.
pub fn realized_variance_raw(grid: &IntradayGrid) -> f64 {
    grid.returns().iter().map(|r| r * r).sum()
}

/// RV in percent², floored.
pub fn realized_variance(grid: &IntradayGrid) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(floor(realized_variance_raw(grid) * PERCENT2, "RV"))
}

/// Σ (high − low)² / λ₂,ₘ in natural-log units, no floor.
pub fn realized_range_raw(grid: &IntradayGrid, scaling: &RangeScaling) -> Result<f64> {
    let mut acc = 0.0;
    for (index, b) in grid.bars().iter().enumerate() {
        if b.high < b.low {
            return Err(Error::InvalidBar { index });
        }
        let s = b.range();
        acc += s * s;
    }
    Ok(acc / scaling.lambda2m)
}

/// RRV in percent², floored.
pub fn realized_range_volatility(grid: &IntradayGrid, scaling: &RangeScaling) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(floor(realized_range_raw(grid, scaling)? * PERCENT2, "RRV"))
}

/// Parzen weight function on `[0, 1]`.
pub fn parzen(u: f64) -> f64 {
    let u = u.abs();
    if u <= 0.5 {
        1.0 - 6.0 * u * u + 6.0 * u * u * u
    } else if u <= 1.0 {
        2.0 * (1.0 - u).powi(3)
    } else {
        0.0
    }
}

/// Tuning for the data-driven realized-kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Bars per return used for the sparse (low-frequency) RV.
    pub sparse_step: usize,
    pub c_star: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            sparse_step: 20,
            c_star: 3.5134,
        }
    }
}

/// Parzen bandwidth `H = ceil(c* ξ^{4/5} n^{3/5})` with `ξ² = ω̂² / RV_sparse`
/// and `ω̂² = RV / (2n)`.
pub fn kernel_bandwidth(grid: &IntradayGrid, cfg: &KernelConfig) -> usize {
    let x = grid.returns();
    let n = x.len();
    let rv: f64 = x.iter().map(|r| r * r).sum();
    let step = if n >= 2 * cfg.sparse_step {
        cfg.sparse_step
    } else {
        1
    };
    // Subsampled sparse RV averaged over all offsets.
    let mut rv_sparse = 0.0;
    for offset in 0..step {
        let mut acc = 0.0;
        let mut i = offset;
        while i + step <= n {
            let r: f64 = x[i..i + step].iter().sum();
            acc += r * r;
            i += step;
        }
        rv_sparse += acc;
    }
    rv_sparse /= step as f64;
    if rv <= 0.0 || rv_sparse <= 0.0 {
        return 0;
    }
    let omega2 = rv / (2.0 * n as f64);
    let xi2 = omega2 / rv_sparse;
    let h = cfg.c_star * xi2.powf(0.4) * (n as f64).powf(0.6);
    h.ceil() as usize
}

/// Realized kernel with a fixed bandwidth, natural-log units, no floor.
pub fn realized_kernel_with_bandwidth(grid: &IntradayGrid, bandwidth: usize) -> Result<f64> {
    let x = grid.returns();
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if bandwidth > 0 && n < bandwidth + 2 {
        return Err(Error::Bandwidth { bandwidth, bars: n });
    }
    let autocov = |h: usize| -> f64 { (h..n).map(|j| x[j] * x[j - h]).sum() };
    let mut rk = autocov(0);
    for h in 1..=bandwidth {
        let w = parzen(h as f64 / (bandwidth as f64 + 1.0));
        rk += 2.0 * w * autocov(h);
    }
    Ok(rk)
}

/// Parzen realized kernel in percent², floored.
pub fn realized_kernel(grid: &IntradayGrid) -> Result<f64> {
    realized_kernel_cfg(grid, &KernelConfig::default())
}

pub fn realized_kernel_cfg(grid: &IntradayGrid, cfg: &KernelConfig) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::Bandwidth {
            bandwidth: 1,
            bars: grid.len(),
        });
    }
    let h = kernel_bandwidth(grid, cfg);
    let rk = realized_kernel_with_bandwidth(grid, h)?;
    Ok(floor(rk * PERCENT2, "RK"))
}

/// Applies `f` to every grid and collects a dated measure series.
pub fn measure_series<F>(
    grids: &[IntradayGrid],
    kind: MeasureKind,
    f: F,
) -> Result<RealizedMeasureSeries>
where
    F: Fn(&IntradayGrid) -> Result<f64>,
{
    let dates: Vec<Date> = grids.iter().map(|g| g.date().clone()).collect();
    let values = grids.iter().map(&f).collect::<Result<Vec<_>>>()?;
    RealizedMeasureSeries::new(dates, values, kind)
}

/// ĉ = Σ(r − r̄)² / Σ RKᵒ over dates shared exactly by both inputs.
pub fn proxy_adjustment(
    returns: &DailyReturnSeries,
    rk_open_hours: &RealizedMeasureSeries,
) -> Result<ProxyAdjustment> {
    if returns.dates() != rk_open_hours.dates() {
        let d = returns
            .dates()
            .iter()
            .zip(rk_open_hours.dates())
            .find(|(a, b)| a != b)
            .map(|(a, _)| a.to_string())
            .unwrap_or_else(|| "<length mismatch>".into());
        return Err(Error::Alignment(format!("returns and RK differ at {d}")));
    }
    let rbar = returns.mean();
    let num: f64 = returns
        .values()
        .iter()
        .map(|r| (r - rbar) * (r - rbar))
        .sum();
    let den: f64 = rk_open_hours.values().iter().sum();
    if den <= 0.0 {
        return Err(Error::InvalidParameter("sum of RK must be positive".into()));
    }
    ProxyAdjustment::new(num / den)
}

pub fn apply_proxy(
    rk_open_hours: &RealizedMeasureSeries,
    adj: &ProxyAdjustment,
) -> RealizedMeasureSeries {
    let values = rk_open_hours
        .values()
        .iter()
        .map(|v| v * adj.c_hat())
        .collect();
    RealizedMeasureSeries::new(rk_open_hours.dates().to_vec(), values, MeasureKind::Proxy)
        .expect("positive values scaled by positive c_hat")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Bar;

    fn grid_from_returns(rs: &[f64]) -> IntradayGrid {
        let mut p = 0.0;
        let bars = rs
            .iter()
            .map(|r| {
                let o = p;
                p += r;
                Bar::new(o, o.max(p), o.min(p), p)
            })
            .collect();
        IntradayGrid::new(Date::from("d"), bars, 300).unwrap()
    }

    #[test]
    fn rv_hand_sum() {
        let g = grid_from_returns(&[0.01, -0.02, 0.01]);
        assert!((realized_variance_raw(&g) - 0.0006).abs() < 1e-15);
        assert!((realized_variance(&g).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn flat_day_is_floored() {
        let g = grid_from_returns(&[0.0, 0.0, 0.0]);
        assert_eq!(realized_variance(&g).unwrap(), EPS_FLOOR);
        assert_eq!(
            realized_range_volatility(&g, &RangeScaling::default()).unwrap(),
            EPS_FLOOR
        );
    }

    #[test]
    fn rrv_single_bar() {
        let g =
            IntradayGrid::new(Date::from("d"), vec![Bar::new(0.0, 0.01, -0.01, 0.0)], 300).unwrap();
        let s = RangeScaling::new(2.0, Some(20)).unwrap();
        assert!((realized_range_raw(&g, &s).unwrap() - 0.0002).abs() < 1e-16);
        let s4 = RangeScaling::new(4.0, Some(20)).unwrap();
        assert!((realized_range_raw(&g, &s4).unwrap() - 0.0001).abs() < 1e-16);
    }

    #[test]
    fn squared_returns() {
        let r = DailyReturnSeries::from_values(vec![1.0, -2.0, 0.0, -3.0]).unwrap();
        assert_eq!(squared_return(&r).values(), &[1.0, 4.0, EPS_FLOOR, 9.0]);
    }

    #[test]
    fn parzen_weights() {
        assert_eq!(parzen(0.0), 1.0);
        assert!((parzen(0.5) - 0.25).abs() < 1e-15);
        assert!((parzen(0.75) - 2.0 * 0.25f64.powi(3)).abs() < 1e-15);
        assert_eq!(parzen(1.0), 0.0);
    }

    #[test]
    fn zero_bandwidth_kernel_is_rv() {
        let g = grid_from_returns(&[0.01, -0.02, 0.01, 0.005]);
        assert_eq!(
            realized_kernel_with_bandwidth(&g, 0).unwrap(),
            realized_variance_raw(&g)
        );
    }

    #[test]
    fn bandwidth_too_large() {
        let g = grid_from_returns(&[0.01, -0.02]);
        assert_eq!(
            realized_kernel_with_bandwidth(&g, 1).unwrap_err(),
            Error::Bandwidth {
                bandwidth: 1,
                bars: 2
            }
        );
        assert!(realized_kernel(&g).is_err());
    }

    #[test]
    fn proxy_examples() {
        let r = DailyReturnSeries::from_values(vec![1.0, -1.0]).unwrap();
        let rk = RealizedMeasureSeries::new(r.dates().to_vec(), vec![0.5, 0.5], MeasureKind::Rk)
            .unwrap();
        let adj = proxy_adjustment(&r, &rk).unwrap();
        assert_eq!(adj.c_hat(), 2.0);
        let p = apply_proxy(&rk, &adj);
        assert_eq!(p.values(), &[1.0, 1.0]);
        assert_eq!(p.kind(), MeasureKind::Proxy);

        let one = apply_proxy(&rk, &ProxyAdjustment::new(1.0).unwrap());
        assert_eq!(one.values(), rk.values());

        let other = RealizedMeasureSeries::new(
            vec!["x".into(), "y".into()],
            vec![0.5, 0.5],
            MeasureKind::Rk,
        )
        .unwrap();
        assert!(matches!(
            proxy_adjustment(&r, &other),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn range_scaling_validation() {
        assert!(RangeScaling::new(0.0, None).is_err());
        assert!(RangeScaling::new(3.0, None).is_err());
        assert!(RangeScaling::new(LAMBDA2_CONTINUOUS, None).is_ok());
        assert!(RangeScaling::new(3.0, Some(50)).is_ok());
    }
}
