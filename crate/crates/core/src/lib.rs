//! Realized EGARCH volatility modelling.
//!
//! The crate covers the whole daily-volatility workflow:
//!
//! - [`measures`]: realized variance, realized range and realized kernel from
//!   intraday OHLC bars, plus the scaled open-hours proxy.
//! - [`diagnostics`]: moments, Jarque–Bera and (robust) Ljung–Box.
//! - [`models`]: GARCH, GJR, EGARCH and realized EGARCH filters.
//! - [`estimation`]: Gaussian QML with multistart simplex/BFGS and sandwich
//!   standard errors.
//! - [`forecast`]: recursive and rolling one-step-ahead forecasts and their
//!   MSE / QLIKE / predictive log-likelihood scores.
//! - [`simulation`]: daily-model and intraday path simulators and range
//!   constant calibration.
//! - [`cli`]: the `regarch` command-line front end.
//!
//! Returns are in percent and variances in percent² throughout.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod forecast;
pub mod measures;
pub mod models;
pub mod optim;
pub mod series;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
