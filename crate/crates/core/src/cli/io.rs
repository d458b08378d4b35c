//! CSV and JSON file formats used by the command-line tool.
//!
//! | file      | header                                  | units            |
//! |-----------|-----------------------------------------|------------------|
//! | bars      | `date,timestamp,open,high,low,close`    | prices           |
//! | returns   | `date,return`                           | percent          |
//! | measures  | `date,kind,value`                       | percent²         |
//! | forecasts | `date,h_hat`                            | percent²         |
//!
//! Timestamps are integer seconds or `HH:MM[:SS]`.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::forecast::ForecastSeries;
use crate::series::{
    Bar, DailyReturnSeries, Date, IntradayGrid, MeasureKind, RealizedMeasureSeries,
};

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(file))
}

/// Positions of the named columns, erroring on the first missing one.
fn columns(reader: &mut csv::Reader<File>, path: &Path, names: &[&str]) -> Result<Vec<usize>> {
    let headers = reader.headers()?.clone();
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| {
                    Error::InvalidSeries(format!("{}: missing column `{name}`", path.display()))
                })
        })
        .collect()
}

fn bad_row(path: &Path, line: u64, what: impl std::fmt::Display) -> Error {
    Error::InvalidSeries(format!("{}: line {line}: {what}", path.display()))
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize, path: &Path, line: u64) -> Result<&'a str> {
    rec.get(i)
        .ok_or_else(|| bad_row(path, line, "too few fields"))
}

fn number(rec: &csv::StringRecord, i: usize, path: &Path, line: u64) -> Result<f64> {
    let s = field(rec, i, path, line)?;
    s.parse::<f64>()
        .map_err(|_| bad_row(path, line, format!("`{s}` is not a number")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn read_returns(path: &Path) -> Result<DailyReturnSeries> {
    let mut rdr = open(path)?;
    let cols = columns(&mut rdr, path, &["date", "return"])?;
    let (mut dates, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        dates.push(Date::new(field(&rec, cols[0], path, line)?));
        values.push(number(&rec, cols[1], path, line)?);
    }
    DailyReturnSeries::new(dates, values)
        .map_err(|e| Error::InvalidSeries(format!("{}: {e}", path.display())))
}

pub fn write_returns(path: &Path, returns: &DailyReturnSeries) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["date", "return"])?;
    for (d, r) in returns.dates().iter().zip(returns.values()) {
        w.write_record([d.as_str(), &r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// All series in a measures file, one per kind in order of first appearance.
pub fn read_measures(path: &Path) -> Result<Vec<RealizedMeasureSeries>> {
    let mut rdr = open(path)?;
    let cols = columns(&mut rdr, path, &["date", "kind", "value"])?;
    let mut order: Vec<MeasureKind> = Vec::new();
    let mut rows: HashMap<MeasureKind, (Vec<Date>, Vec<f64>)> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let date = Date::new(field(&rec, cols[0], path, line)?);
        let kind: MeasureKind = field(&rec, cols[1], path, line)?
            .parse()
            .map_err(|e| bad_row(path, line, e))?;
        let value = number(&rec, cols[2], path, line)?;
        let entry = rows.entry(kind).or_insert_with(|| {
            order.push(kind);
            (Vec::new(), Vec::new())
        });
        entry.0.push(date);
        entry.1.push(value);
    }
    order
        .into_iter()
        .map(|kind| {
            let (d, v) = rows.remove(&kind).expect("kind recorded");
            RealizedMeasureSeries::new(d, v, kind)
                .map_err(|e| Error::InvalidSeries(format!("{} ({kind}): {e}", path.display())))
        })
        .collect()
}

/// Writes several series into one `date,kind,value` file, grouped by date.
pub fn write_measures(path: &Path, series: &[&RealizedMeasureSeries]) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["date", "kind", "value"])?;
    let mut rows: Vec<(&Date, usize, f64)> = Vec::new();
    for (j, s) in series.iter().enumerate() {
        for (d, v) in s.dates().iter().zip(s.values()) {
            rows.push((d, j, *v));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));
    for (d, j, v) in rows {
        w.write_record([d.as_str(), series[j].kind().as_str(), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// A dated value series from a 2-column (`date,<value>`) or measures file.
pub fn read_value_series(path: &Path, kind: Option<MeasureKind>) -> Result<(Vec<Date>, Vec<f64>)> {
    let mut rdr = open(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().any(|h| h.eq_ignore_ascii_case("kind")) {
        drop(rdr);
        let all = read_measures(path)?;
        let chosen = match kind {
            Some(k) => all.into_iter().find(|s| s.kind() == k),
            None if all.len() == 1 => all.into_iter().next(),
            None => {
                return Err(Error::Config(format!(
                    "{} holds {} measure kinds; pick one with --kind",
                    path.display(),
                    all.len()
                )))
            }
        };
        let s = chosen.ok_or_else(|| {
            Error::InvalidSeries(format!("{}: requested kind not present", path.display()))
        })?;
        return Ok((s.dates().to_vec(), s.values().to_vec()));
    }
    if headers.len() != 2 || !headers[0].eq_ignore_ascii_case("date") {
        return Err(Error::InvalidSeries(format!(
            "{}: expected columns `date,<value>` or `date,kind,value`",
            path.display()
        )));
    }
    let (mut dates, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        dates.push(Date::new(field(&rec, 0, path, line)?));
        values.push(number(&rec, 1, path, line)?);
    }
    Ok((dates, values))
}

pub fn read_forecasts(path: &Path) -> Result<ForecastSeries> {
    let mut rdr = open(path)?;
    let cols = columns(&mut rdr, path, &["date", "h_hat"])?;
    let (mut dates, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        dates.push(Date::new(field(&rec, cols[0], path, line)?));
        values.push(number(&rec, cols[1], path, line)?);
    }
    ForecastSeries::new(dates, values)
        .map_err(|e| Error::InvalidSeries(format!("{}: {e}", path.display())))
}

pub fn write_forecasts(path: &Path, f: &ForecastSeries) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["date", "h_hat"])?;
    for (d, h) in f.dates().iter().zip(f.h_hat()) {
        w.write_record([d.as_str(), &h.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Seconds since midnight from `HH:MM[:SS]` or a plain integer.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return None;
    }
    let mut secs = 0i64;
    for (i, p) in parts.iter().enumerate() {
        let v: i64 = p.parse().ok()?;
        let limit = if i == 0 { 24 } else { 60 };
        if !(0..limit).contains(&v) {
            return None;
        }
        secs = secs * 60 + v;
    }
    if parts.len() == 2 {
        secs *= 60;
    }
    Some(secs)
}

pub fn format_timestamp(secs: i64) -> String {
    format!(
        "{:02}:{:02}:{:02}",
        secs / 3600,
        (secs / 60) % 60,
        secs % 60
    )
}

/// Reads bars into one grid per date, converting prices to log prices.
///
/// Rows must be grouped by date in increasing order with increasing,
/// equidistant timestamps. The spacing becomes the grid interval; a day with
/// a single bar uses `interval` (or 300 s). When `interval` is given every
/// day's spacing must equal it.
pub fn read_bars(path: &Path, interval: Option<u32>) -> Result<Vec<IntradayGrid>> {
    let mut rdr = open(path)?;
    let cols = columns(
        &mut rdr,
        path,
        &["date", "timestamp", "open", "high", "low", "close"],
    )?;
    let mut grids = Vec::new();
    let mut current: Option<(Date, Vec<i64>, Vec<Bar>, u64)> = None;

    let mut finish = |day: (Date, Vec<i64>, Vec<Bar>, u64)| -> Result<()> {
        let (date, times, bars, line) = day;
        let mut spacing = None;
        for w in times.windows(2) {
            let d = w[1] - w[0];
            if d <= 0 {
                return Err(bad_row(
                    path,
                    line,
                    format!("timestamps not increasing on {date}"),
                ));
            }
            match spacing {
                None => spacing = Some(d),
                Some(s) if s != d => {
                    return Err(bad_row(
                        path,
                        line,
                        format!("timestamps on {date} are not equidistant ({s} s vs {d} s)"),
                    ))
                }
                _ => {}
            }
        }
        let step = match (spacing, interval) {
            (Some(s), Some(i)) if s != i as i64 => {
                return Err(bad_row(
                    path,
                    line,
                    format!("bar spacing {s} s on {date} differs from --interval {i}"),
                ))
            }
            (Some(s), _) => s as u32,
            (None, Some(i)) => i,
            (None, None) => 300,
        };
        grids.push(IntradayGrid::new(date, bars, step)?);
        Ok(())
    };

    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let date = Date::new(field(&rec, cols[0], path, line)?);
        let ts_text = field(&rec, cols[1], path, line)?;
        let ts = parse_timestamp(ts_text)
            .ok_or_else(|| bad_row(path, line, format!("bad timestamp `{ts_text}`")))?;
        let mut px = [0.0; 4];
        for (slot, &c) in px.iter_mut().zip(&cols[2..]) {
            let v = number(&rec, c, path, line)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad_row(path, line, format!("price {v} is not positive")));
            }
            *slot = v.ln();
        }
        let bar = Bar::new(px[0], px[1], px[2], px[3]);
        if !bar.is_valid() {
            return Err(bad_row(
                path,
                line,
                "high/low do not bracket open and close",
            ));
        }
        match &mut current {
            Some((d, times, bars, _)) if *d == date => {
                times.push(ts);
                bars.push(bar);
            }
            _ => {
                if let Some((prev, ..)) = &current {
                    if date < *prev {
                        return Err(bad_row(
                            path,
                            line,
                            format!(
                                "date {date} after {prev}: rows must be grouped by increasing date"
                            ),
                        ));
                    }
                }
                if let Some(day) = current.take() {
                    finish(day)?;
                }
                current = Some((date, vec![ts], vec![bar], line));
            }
        }
    }
    if let Some(day) = current.take() {
        finish(day)?;
    }
    if grids.is_empty() {
        return Err(Error::InvalidSeries(format!("{}: no bars", path.display())));
    }
    Ok(grids)
}

/// Writes grids as bars with prices `exp(log price)`; bar `i` is stamped at
/// `start + (i + 1)·interval` seconds.
pub fn write_bars(path: &Path, grids: &[IntradayGrid], start: i64) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["date", "timestamp", "open", "high", "low", "close"])?;
    for g in grids {
        let step = g.interval_seconds() as i64;
        for (i, b) in g.bars().iter().enumerate() {
            w.write_record([
                g.date().as_str(),
                &format_timestamp(start + (i as i64 + 1) * step),
                &b.open.exp().to_string(),
                &b.high.exp().to_string(),
                &b.low.exp().to_string(),
                &b.close.exp().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, doc: &Map<String, Value>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    let mut f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("09:05"), Some(9 * 3600 + 300));
        assert_eq!(parse_timestamp("09:05:30"), Some(9 * 3600 + 330));
        assert_eq!(parse_timestamp("1200"), Some(1200));
        assert_eq!(parse_timestamp("9:61"), None);
        assert_eq!(parse_timestamp("noon"), None);
        assert_eq!(format_timestamp(9 * 3600 + 330), "09:05:30");
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("/a/out.csv"), "refits.json"),
            PathBuf::from("/a/out.refits.json")
        );
    }
}
