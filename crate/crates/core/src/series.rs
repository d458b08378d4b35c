//! Dated series shared by every other module.
//!
//! Dates are opaque, totally ordered labels. Nothing here knows about
//! calendars; alignment is pure set membership.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque sortable date label (e.g. `2010-01-04` or a zero-padded day index).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Date(pub String);

impl Date {
    pub fn new(s: impl Into<String>) -> Self {
        Date(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Zero-padded day index, used for simulated series.
    pub fn from_index(i: usize) -> Self {
        Date(format!("{i:06}"))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Date {
    fn from(s: &str) -> Self {
        Date(s.to_string())
    }
}

fn check_dates(dates: &[Date]) -> Result<()> {
    for (i, w) in dates.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::InvalidSeries(format!(
                "dates must be strictly increasing: {} at position {} is followed by {}",
                w[0], i, w[1]
            )));
        }
    }
    Ok(())
}

/// Close-to-close daily returns in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyReturnSeries {
    dates: Vec<Date>,
    returns: Vec<f64>,
}

impl DailyReturnSeries {
    pub fn new(dates: Vec<Date>, returns: Vec<f64>) -> Result<Self> {
        if dates.len() != returns.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates but {} returns",
                dates.len(),
                returns.len()
            )));
        }
        check_dates(&dates)?;
        if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite return on {}",
                dates[i]
            )));
        }
        Ok(Self { dates, returns })
    }

    /// Builds a series dated by zero-padded indices `000001, 000002, ...`.
    pub fn from_values(returns: Vec<f64>) -> Result<Self> {
        let dates = (1..=returns.len()).map(Date::from_index).collect();
        Self::new(dates, returns)
    }

    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn mean(&self) -> f64 {
        crate::stats::mean(&self.returns)
    }

    /// Contiguous sub-series `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            dates: self.dates[start..end].to_vec(),
            returns: self.returns[start..end].to_vec(),
        }
    }
}

/// Which realized quantity a measure series holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    SquaredReturn,
    Rv,
    Rrv,
    Rk,
    Proxy,
}

impl MeasureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::SquaredReturn => "r2",
            MeasureKind::Rv => "rv",
            MeasureKind::Rrv => "rrv",
            MeasureKind::Rk => "rk",
            MeasureKind::Proxy => "proxy",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r2" | "squared-return" | "squared_return" => Ok(MeasureKind::SquaredReturn),
            "rv" => Ok(MeasureKind::Rv),
            "rrv" => Ok(MeasureKind::Rrv),
            "rk" => Ok(MeasureKind::Rk),
            "proxy" => Ok(MeasureKind::Proxy),
            other => Err(Error::InvalidSeries(format!(
                "unknown measure kind `{other}`"
            ))),
        }
    }
}

/// Strictly positive realized measures in percent² per day.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedMeasureSeries {
    dates: Vec<Date>,
    values: Vec<f64>,
    kind: MeasureKind,
}

impl RealizedMeasureSeries {
    pub fn new(dates: Vec<Date>, values: Vec<f64>, kind: MeasureKind) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        check_dates(&dates)?;
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidSeries(format!(
                "{kind} value {} on {} is not strictly positive",
                values[i], dates[i]
            )));
        }
        Ok(Self {
            dates,
            values,
            kind,
        })
    }

    pub fn dates(&self) -> &[Date] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            dates: self.dates[start..end].to_vec(),
            values: self.values[start..end].to_vec(),
            kind: self.kind,
        }
    }

    /// Value on `date`, if present.
    pub fn get(&self, date: &Date) -> Option<f64> {
        self.dates.binary_search(date).ok().map(|i| self.values[i])
    }
}

/// One intraday interval; prices are natural-log prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
}

impl Bar {
    pub fn new(open: f64, high: f64, low: f64, close: f64) -> Self {
        Self {
            open,
            high,
            low,
            close,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.open, self.high, self.low, self.close]
            .iter()
            .all(|v| v.is_finite())
            && self.low <= self.open.min(self.close)
            && self.open.max(self.close) <= self.high
    }

    pub fn range(&self) -> f64 {
        self.high - self.low
    }
}

/// Equidistant OHLC log-price bars for a single trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayGrid {
    date: Date,
    bars: Vec<Bar>,
    interval_seconds: u32,
}

impl IntradayGrid {
    pub fn new(date: Date, bars: Vec<Bar>, interval_seconds: u32) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if interval_seconds == 0 {
            return Err(Error::InvalidSeries(
                "interval_seconds must be positive".into(),
            ));
        }
        if let Some(index) = bars.iter().position(|b| !b.is_valid()) {
            return Err(Error::InvalidBar { index });
        }
        Ok(Self {
            date,
            bars,
            interval_seconds,
        })
    }

    pub fn date(&self) -> &Date {
        &self.date
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn interval_seconds(&self) -> u32 {
        self.interval_seconds
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Intraday log returns: first bar open-to-close, then close-to-close.
    pub fn returns(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.bars.len());
        out.push(self.bars[0].close - self.bars[0].open);
        for w in self.bars.windows(2) {
            out.push(w[1].close - w[0].close);
        }
        out
    }

    /// Merges every `factor` consecutive bars into one; a trailing partial
    /// group is merged as well.
    pub fn aggregate(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidSeries(
                "aggregation factor must be positive".into(),
            ));
        }
        let bars = self
            .bars
            .chunks(factor)
            .map(|c| Bar {
                open: c[0].open,
                close: c[c.len() - 1].close,
                high: c.iter().map(|b| b.high).fold(f64::NEG_INFINITY, f64::max),
                low: c.iter().map(|b| b.low).fold(f64::INFINITY, f64::min),
            })
            .collect();
        Self::new(
            self.date.clone(),
            bars,
            self.interval_seconds * factor as u32,
        )
    }
}

/// How [`align`] reconciles differing date sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignPolicy {
    Intersect,
    Strict,
}

/// Returns plus K realized measures, all on one date set.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset {
    returns: DailyReturnSeries,
    measures: Vec<RealizedMeasureSeries>,
}

impl AlignedDataset {
    /// Dataset with no realized measures (conventional GARCH-type models).
    pub fn returns_only(returns: DailyReturnSeries) -> Self {
        Self {
            returns,
            measures: Vec::new(),
        }
    }

    pub fn returns(&self) -> &DailyReturnSeries {
        &self.returns
    }

    pub fn measures(&self) -> &[RealizedMeasureSeries] {
        &self.measures
    }

    pub fn dates(&self) -> &[Date] {
        self.returns.dates()
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn n_measures(&self) -> usize {
        self.measures.len()
    }

    /// `log x_{k,t}` for every measure, K rows of length T.
    pub fn log_measures(&self) -> Vec<Vec<f64>> {
        self.measures
            .iter()
            .map(|m| m.values().iter().map(|v| v.ln()).collect())
            .collect()
    }

    /// Contiguous window `[start, end)` over all component series.
    pub fn window(&self, start: usize, end: usize) -> Self {
        Self {
            returns: self.returns.slice(start, end),
            measures: self.measures.iter().map(|m| m.slice(start, end)).collect(),
        }
    }

    /// Keeps only the measures at the given positions, in that order.
    pub fn select_measures(&self, which: &[usize]) -> Result<Self> {
        let measures = which
            .iter()
            .map(|&i| {
                self.measures.get(i).cloned().ok_or_else(|| {
                    Error::InvalidSeries(format!(
                        "measure index {i} out of range ({} measures)",
                        self.measures.len()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            returns: self.returns.clone(),
            measures,
        })
    }
}

/// Puts returns and measures on a common date set.
pub fn align(
    returns: &DailyReturnSeries,
    measures: &[RealizedMeasureSeries],
    policy: AlignPolicy,
) -> Result<AlignedDataset> {
    match policy {
        AlignPolicy::Strict => {
            for m in measures {
                if let Some(d) = first_mismatch(returns.dates(), m.dates()) {
                    return Err(Error::Alignment(format!(
                        "{} series differs from returns at date {d}",
                        m.kind()
                    )));
                }
            }
            if returns.is_empty() {
                return Err(Error::EmptyIntersection);
            }
            Ok(AlignedDataset {
                returns: returns.clone(),
                measures: measures.to_vec(),
            })
        }
        AlignPolicy::Intersect => {
            let mut keep: HashSet<&Date> = returns.dates().iter().collect();
            for m in measures {
                let these: HashSet<&Date> = m.dates().iter().collect();
                keep.retain(|d| these.contains(d));
            }
            if keep.is_empty() {
                return Err(Error::EmptyIntersection);
            }
            let pick_r: Vec<usize> = (0..returns.len())
                .filter(|&i| keep.contains(&returns.dates()[i]))
                .collect();
            let new_returns = DailyReturnSeries {
                dates: pick_r.iter().map(|&i| returns.dates()[i].clone()).collect(),
                returns: pick_r.iter().map(|&i| returns.values()[i]).collect(),
            };
            let new_measures = measures
                .iter()
                .map(|m| {
                    let pick: Vec<usize> = (0..m.len())
                        .filter(|&i| keep.contains(&m.dates()[i]))
                        .collect();
                    RealizedMeasureSeries {
                        dates: pick.iter().map(|&i| m.dates()[i].clone()).collect(),
                        values: pick.iter().map(|&i| m.values()[i]).collect(),
                        kind: m.kind(),
                    }
                })
                .collect();
            Ok(AlignedDataset {
                returns: new_returns,
                measures: new_measures,
            })
        }
    }
}

/// First date (in sorted order) where two date lists disagree.
fn first_mismatch<'a>(a: &'a [Date], b: &'a [Date]) -> Option<&'a Date> {
    let n = a.len().min(b.len());
    for i in 0..n {
        if a[i] != b[i] {
            return Some(if a[i] < b[i] { &a[i] } else { &b[i] });
        }
    }
    if a.len() > n {
        Some(&a[n])
    } else if b.len() > n {
        Some(&b[n])
    } else {
        None
    }
}

/// Conditional-mean treatment of returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemeanMode {
    /// Zero conditional mean; returns are used as-is.
    #[default]
    None,
    SampleMean,
}

pub fn demean(returns: &DailyReturnSeries, mode: DemeanMode) -> DailyReturnSeries {
    match mode {
        DemeanMode::None => returns.clone(),
        DemeanMode::SampleMean => {
            let m = returns.mean();
            DailyReturnSeries {
                dates: returns.dates.clone(),
                returns: returns.returns.iter().map(|r| r - m).collect(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dates(ds: &[&str]) -> Vec<Date> {
        ds.iter().map(|d| Date::from(*d)).collect()
    }

    fn rets(ds: &[&str]) -> DailyReturnSeries {
        DailyReturnSeries::new(dates(ds), (0..ds.len()).map(|i| i as f64).collect()).unwrap()
    }

    fn meas(ds: &[&str]) -> RealizedMeasureSeries {
        RealizedMeasureSeries::new(dates(ds), vec![1.0; ds.len()], MeasureKind::Rv).unwrap()
    }

    #[test]
    fn intersect_keeps_common_dates() {
        let d = align(
            &rets(&["d1", "d2", "d3"]),
            &[meas(&["d2", "d3", "d4"])],
            AlignPolicy::Intersect,
        )
        .unwrap();
        assert_eq!(d.dates(), &dates(&["d2", "d3"])[..]);
        assert_eq!(d.returns().values(), &[1.0, 2.0]);
        assert_eq!(d.measures()[0].dates(), d.dates());
    }

    #[test]
    fn strict_identity() {
        let d = align(
            &rets(&["d1", "d2"]),
            &[meas(&["d1", "d2"])],
            AlignPolicy::Strict,
        )
        .unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn strict_mismatch_names_date() {
        let err = align(
            &rets(&["d1", "d2"]),
            &[meas(&["d1", "d3"])],
            AlignPolicy::Strict,
        )
        .unwrap_err();
        match err {
            Error::Alignment(msg) => assert!(msg.contains("d2"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn disjoint_is_error() {
        let err = align(
            &rets(&["a", "b"]),
            &[meas(&["c", "d"])],
            AlignPolicy::Intersect,
        )
        .unwrap_err();
        assert_eq!(err, Error::EmptyIntersection);
    }

    #[test]
    fn demean_examples() {
        let s = DailyReturnSeries::from_values(vec![1.0, -1.0]).unwrap();
        assert_eq!(demean(&s, DemeanMode::SampleMean).values(), &[1.0, -1.0]);
        let s = DailyReturnSeries::from_values(vec![2.0, 4.0]).unwrap();
        assert_eq!(demean(&s, DemeanMode::SampleMean).values(), &[-1.0, 1.0]);
        assert_eq!(demean(&s, DemeanMode::None), s);
    }

    #[test]
    fn rejects_unsorted_or_nonpositive() {
        assert!(DailyReturnSeries::new(dates(&["b", "a"]), vec![0.0, 0.0]).is_err());
        assert!(DailyReturnSeries::new(dates(&["a", "a"]), vec![0.0, 0.0]).is_err());
        assert!(DailyReturnSeries::new(dates(&["a"]), vec![f64::NAN]).is_err());
        assert!(RealizedMeasureSeries::new(dates(&["a"]), vec![0.0], MeasureKind::Rv).is_err());
    }

    #[test]
    fn grid_validation_and_aggregation() {
        let bad = IntradayGrid::new(Date::from("d"), vec![Bar::new(0.0, 0.1, 0.05, 0.0)], 300);
        assert_eq!(bad.unwrap_err(), Error::InvalidBar { index: 0 });
        assert_eq!(
            IntradayGrid::new(Date::from("d"), vec![], 300).unwrap_err(),
            Error::EmptyGrid
        );

        let bars = vec![
            Bar::new(0.0, 0.02, -0.01, 0.01),
            Bar::new(0.01, 0.03, 0.0, 0.02),
            Bar::new(0.02, 0.02, -0.02, -0.01),
        ];
        let g = IntradayGrid::new(Date::from("d"), bars, 60).unwrap();
        assert_eq!(g.returns(), vec![0.01, 0.01, -0.03]);
        let a = g.aggregate(2).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.bars()[0], Bar::new(0.0, 0.03, -0.01, 0.02));
        assert_eq!(a.interval_seconds(), 120);
    }
}
