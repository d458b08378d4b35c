//! Quasi-maximum-likelihood estimation.
//!
//! Parameters are optimized in unconstrained coordinates: positivity through
//! `exp`, unit-interval quantities (β, and GARCH persistence when
//! stationarity is enforced) through the logistic map. For REGARCH the
//! measurement covariance Σ is concentrated out as the residual covariance,
//! so it is never searched over, and by default the search is confined to
//! parameters whose filter is invertible.

mod fit;
mod spec;
mod stderr;

pub use fit::{fit, information_criteria, FitOptions, FitResult};
pub use spec::{residual_covariance, ModelKind, ModelParams, ModelSpec, PreparedData};
pub use stderr::{hessian_std_errors, robust_std_errors};
