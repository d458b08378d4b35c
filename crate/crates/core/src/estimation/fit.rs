use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::spec::{sigma_vech, ModelParams, ModelSpec, PreparedData};
use super::stderr::robust_std_errors_prepared;
use crate::error::{Error, Result};
use crate::optim::{bfgs, central_gradient, nelder_mead, BfgsOptions, NelderMeadOptions};
use crate::series::AlignedDataset;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub seed: u64,
    /// Size of the standard multistart set (defaults plus seeded perturbations).
    pub n_starts: usize,
    /// Standard deviation of start perturbations in unconstrained coordinates.
    pub perturbation: f64,
    pub tol_grad: f64,
    pub ftol: f64,
    pub max_iterations: usize,
    /// Simplex evaluations per start, as a multiple of the parameter count.
    pub simplex_evals_per_param: usize,
    pub min_obs: usize,
    /// Optimum from a previous fit; polished first, without a simplex phase.
    pub warm_start: Option<Vec<f64>>,
    /// Additional natural-coordinate starts (e.g. a nested model's optimum).
    pub extra_starts: Vec<Vec<f64>>,
    pub compute_std_errors: bool,
    pub keep_trace: bool,
    /// Initial variance; defaults to the sample variance of the returns.
    pub h1: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            n_starts: 5,
            perturbation: 0.25,
            tol_grad: 1e-4,
            ftol: 1e-8,
            max_iterations: 300,
            simplex_evals_per_param: 150,
            min_obs: 50,
            warm_start: None,
            extra_starts: Vec::new(),
            compute_std_errors: true,
            keep_trace: false,
            h1: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub params: ModelParams,
    /// Free parameters in natural coordinates, ordered as `spec.param_names()`.
    pub natural: Vec<f64>,
    /// QML sandwich standard errors for the free parameters followed by Σ.
    pub std_errors: Option<Vec<f64>>,
    pub loglik_joint: f64,
    pub loglik_return: f64,
    pub aic: f64,
    pub sbic: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub n_iterations: usize,
    pub n_evaluations: usize,
    /// Index of the winning start.
    pub best_start: usize,
    pub objective_trace: Option<Vec<f64>>,
    pub seed: u64,
    /// Initial variance used by the filter.
    pub h1: f64,
}

impl FitResult {
    /// Names matching `std_errors`: free parameters then Σ entries.
    pub fn std_error_names(&self) -> Vec<String> {
        let mut names = self.spec.param_names();
        names.extend(self.spec.sigma_names());
        names
    }

    /// Free parameters followed by Σ's upper triangle (REGARCH).
    pub fn full_natural(&self) -> Vec<f64> {
        let mut v = self.natural.clone();
        if let ModelParams::Regarch(p) = &self.params {
            v.extend(sigma_vech(&p.sigma));
        }
        v
    }
}

/// `AIC = −2 lnL + 2n`, `SBIC = −2 lnL + n ln T`.
pub fn information_criteria(loglik: f64, n_params: usize, n_obs: f64) -> (f64, f64) {
    let n = n_params as f64;
    (-2.0 * loglik + 2.0 * n, -2.0 * loglik + n * n_obs.ln())
}

struct StartOutcome {
    unc: Vec<f64>,
    f: f64,
    grad_norm: f64,
    iterations: usize,
    evaluations: usize,
    trace: Vec<f64>,
}

/// Quasi-maximum-likelihood fit.
///
/// Every start runs a simplex search followed by a BFGS polish on the
/// negative mean log-likelihood in unconstrained coordinates (a warm start
/// skips the simplex). The best final objective wins, ties going to the
/// lowest start index.
pub fn fit(spec: &ModelSpec, data: &AlignedDataset, options: &FitOptions) -> Result<FitResult> {
    spec.check_data(data)?;
    if data.len() < options.min_obs {
        return Err(Error::InsufficientData {
            needed: options.min_obs,
            got: data.len(),
        });
    }
    if !(crate::stats::variance(data.returns().values()) > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let prepared = PreparedData::new(data, options.h1);
    let objective = |unc: &[f64]| -> f64 {
        let nat = spec.to_natural(unc);
        match spec.mean_loglik(&nat, &prepared) {
            Some(ll) => -ll,
            None => f64::INFINITY,
        }
    };

    // Assemble starts in unconstrained coordinates; warm start first.
    let mut starts: Vec<(Vec<f64>, bool)> = Vec::new();
    if let Some(w) = &options.warm_start {
        starts.push((spec.to_unconstrained(w), true));
    }
    let base = spec.to_unconstrained(&spec.default_start(data));
    if options.n_starts > 0 {
        starts.push((base.clone(), false));
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let noise = Normal::new(0.0, options.perturbation).expect("valid perturbation");
        for _ in 1..options.n_starts {
            let x: Vec<f64> = base.iter().map(|b| b + noise.sample(&mut rng)).collect();
            starts.push((x, false));
        }
    }
    for e in &options.extra_starts {
        starts.push((spec.to_unconstrained(e), false));
    }
    if starts.is_empty() {
        return Err(Error::Config(
            "no starting points: n_starts = 0 and no warm start".into(),
        ));
    }

    let n = spec.n_free();
    let nm_opts = NelderMeadOptions {
        max_evaluations: options.simplex_evals_per_param * n,
        ftol: options.ftol,
        xtol: 1e-6,
        initial_step: 0.2,
    };
    let bfgs_opts = BfgsOptions {
        max_iterations: options.max_iterations,
        grad_tol: options.tol_grad,
        ftol: 1e-14,
        fd_step: 1e-5,
    };

    let mut outcomes: Vec<StartOutcome> = Vec::with_capacity(starts.len());
    for (x0, warm) in &starts {
        let mut trace = Vec::new();
        let mut evaluations = 0;
        let mut iterations = 0;
        let polished_from = if *warm {
            x0.clone()
        } else {
            let nm = nelder_mead(objective, x0, &nm_opts);
            evaluations += nm.evaluations;
            iterations += nm.iterations;
            trace.extend(nm.trace);
            nm.x
        };
        let q = bfgs(objective, &polished_from, &bfgs_opts);
        evaluations += q.evaluations;
        iterations += q.iterations;
        trace.extend(q.trace);
        outcomes.push(StartOutcome {
            unc: q.x,
            f: q.f,
            grad_norm: q.grad_norm,
            iterations,
            evaluations,
            trace,
        });
    }

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.f < outcomes[best].f {
            best = i;
        }
    }
    let total_iterations: usize = outcomes.iter().map(|o| o.iterations).sum();
    let total_evaluations: usize = outcomes.iter().map(|o| o.evaluations).sum();
    let mut winner = outcomes.swap_remove(best);

    // One more polish if the incumbent stopped short of the gradient certificate.
    if !(winner.grad_norm < options.tol_grad) && winner.f.is_finite() {
        let q = bfgs(objective, &winner.unc, &bfgs_opts);
        if q.f <= winner.f {
            winner.unc = q.x;
            winner.f = q.f;
            winner.grad_norm = q.grad_norm;
            winner.trace.extend(q.trace);
        }
    }
    if !winner.f.is_finite() {
        return Err(Error::NonConvergence {
            best_natural: spec.to_natural(&winner.unc),
            best_mean_loglik: f64::NEG_INFINITY,
            grad_norm: f64::NAN,
        });
    }
    // Re-evaluate the certificate in case the polish returned without a fresh gradient.
    let mut obj = objective;
    let g = central_gradient(&mut obj, &winner.unc, 1e-5);
    let grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let natural = spec.to_natural(&winner.unc);
    if !(grad_norm < options.tol_grad) {
        return Err(Error::NonConvergence {
            best_natural: natural,
            best_mean_loglik: -winner.f,
            grad_norm,
        });
    }

    let mut result = assemble(spec, data, &prepared, natural, options)?;
    result.grad_norm = grad_norm;
    result.n_iterations = total_iterations;
    result.n_evaluations = total_evaluations;
    result.best_start = best;
    result.objective_trace = options
        .keep_trace
        .then(|| winner.trace.iter().map(|f| -f).collect());
    if options.compute_std_errors {
        match robust_std_errors_prepared(&result, &prepared) {
            Ok(se) => result.std_errors = Some(se),
            Err(e) => log::warn!("{}: standard errors unavailable: {e}", spec.name()),
        }
    }
    Ok(result)
}

/// Builds a [`FitResult`] at `natural`, profiling Σ for REGARCH.
pub(crate) fn assemble(
    spec: &ModelSpec,
    data: &AlignedDataset,
    prepared: &PreparedData,
    natural: Vec<f64>,
    options: &FitOptions,
) -> Result<FitResult> {
    let sigma: Option<DMatrix<f64>> = match spec.kind {
        super::ModelKind::Regarch => Some(spec.profiled_sigma(&natural, prepared)?),
        _ => None,
    };
    let params = spec.build(&natural, sigma);
    let out = params.filter(data, Some(prepared.h1))?;
    let n_params = spec.n_params();
    let lnl = out.loglik_joint;
    let (aic, sbic) = information_criteria(lnl, n_params, data.len() as f64);
    Ok(FitResult {
        spec: *spec,
        params,
        natural,
        std_errors: None,
        loglik_joint: out.loglik_joint,
        loglik_return: out.loglik_return,
        aic,
        sbic,
        n_params,
        n_obs: data.len(),
        converged: true,
        grad_norm: f64::NAN,
        n_iterations: 0,
        n_evaluations: 0,
        best_start: 0,
        objective_trace: None,
        seed: options.seed,
        h1: prepared.h1,
    })
}
