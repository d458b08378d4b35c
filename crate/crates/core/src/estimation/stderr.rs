//! QML sandwich standard errors from finite-difference derivatives.
//!
//! All derivatives are taken with respect to the natural parameters (free
//! parameters, then Σ's upper triangle for REGARCH) on the mean
//! log-likelihood scale. With `A = −H` and `B = (1/T) Σ s_t s_t'`,
//! `Var(θ̂) = A⁻¹ B A⁻¹ / T`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::fit::FitResult;
use super::spec::PreparedData;
use crate::error::{Error, Result};
use crate::series::AlignedDataset;

const MAX_CONDITION: f64 = 1e12;

fn step_for(x: f64) -> f64 {
    1e-4 * x.abs().max(1e-2)
}

fn mean_of(terms: &Option<Vec<f64>>) -> f64 {
    match terms {
        Some(v) => v.iter().sum::<f64>() / v.len() as f64,
        None => f64::NAN,
    }
}

/// Information (`A = −H`) and score-outer-product (`B`) matrices.
pub(crate) fn information_matrices(
    fit: &FitResult,
    data: &PreparedData,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let spec = &fit.spec;
    let theta = fit.full_natural();
    let p = theta.len();
    let terms = |x: &[f64]| spec.loglik_terms(x, data);
    let f = |x: &[f64]| mean_of(&terms(x));

    let f0 = f(&theta);
    let steps: Vec<f64> = theta.iter().map(|&x| step_for(x)).collect();
    let mut hess = DMatrix::zeros(p, p);
    let shifted = |pairs: &[(usize, f64)]| {
        let mut x = theta.clone();
        for &(i, d) in pairs {
            x[i] += d;
        }
        f(&x)
    };
    for i in 0..p {
        let hi = steps[i];
        let fp = shifted(&[(i, hi)]);
        let fm = shifted(&[(i, -hi)]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in 0..i {
            let hj = steps[j];
            let fpp = shifted(&[(i, hi), (j, hj)]);
            let fpm = shifted(&[(i, hi), (j, -hj)]);
            let fmp = shifted(&[(i, -hi), (j, hj)]);
            let fmm = shifted(&[(i, -hi), (j, -hj)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return Err(Error::Conditioning {
            condition: f64::INFINITY,
        });
    }

    // Per-observation scores by central differences of the contribution vector.
    let t_len = data.r.len();
    let mut scores = DMatrix::zeros(t_len, p);
    for i in 0..p {
        let hi = steps[i];
        let mut xp = theta.clone();
        xp[i] += hi;
        let mut xm = theta.clone();
        xm[i] -= hi;
        let (Some(tp), Some(tm)) = (terms(&xp), terms(&xm)) else {
            return Err(Error::Conditioning {
                condition: f64::INFINITY,
            });
        };
        for t in 0..t_len {
            scores[(t, i)] = (tp[t] - tm[t]) / (2.0 * hi);
        }
    }
    let opg = scores.transpose() * &scores / t_len as f64;
    Ok((-hess, opg))
}

fn checked_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(a.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(min > 0.0) || condition > MAX_CONDITION {
        return Err(Error::Conditioning { condition });
    }
    let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v));
    Ok(&eig.eigenvectors * inv_diag * eig.eigenvectors.transpose())
}

fn diag_se(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let se: Vec<f64> = (0..cov.nrows()).map(|i| cov[(i, i)].sqrt()).collect();
    if se.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Conditioning {
            condition: f64::INFINITY,
        });
    }
    Ok(se)
}

pub(crate) fn robust_std_errors_prepared(fit: &FitResult, data: &PreparedData) -> Result<Vec<f64>> {
    let (a, b) = information_matrices(fit, data)?;
    let ainv = checked_inverse(&a)?;
    let cov = &ainv * b * &ainv / data.r.len() as f64;
    diag_se(&cov)
}

/// Sandwich standard errors at the fitted optimum, ordered as
/// [`FitResult::std_error_names`].
pub fn robust_std_errors(fit: &FitResult, data: &AlignedDataset) -> Result<Vec<f64>> {
    if !fit.converged {
        return Err(Error::InvalidParameter(
            "standard errors need a converged fit".into(),
        ));
    }
    let prepared = PreparedData::new(data, Some(fit.h1));
    robust_std_errors_prepared(fit, &prepared)
}

/// Inverse-information standard errors, valid under correct specification.
pub fn hessian_std_errors(fit: &FitResult, data: &AlignedDataset) -> Result<Vec<f64>> {
    let prepared = PreparedData::new(data, Some(fit.h1));
    let (a, _) = information_matrices(fit, &prepared)?;
    let ainv = checked_inverse(&a)?;
    diag_se(&(ainv / prepared.r.len() as f64))
}
