//! Unconstrained minimizers: Nelder–Mead simplex and BFGS with
//! central-difference gradients.
//!
//! Objectives may return `f64::INFINITY` (or NaN) for infeasible points;
//! both methods treat such values as "worse than anything finite".

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub trace: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evaluations: usize,
    pub ftol: f64,
    pub xtol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            ftol: 1e-8,
            xtol: 1e-6,
            initial_step: 0.2,
        }
    }
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step * x[i].abs().max(1.0);
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut converged = false;

    while evals < opts.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        iterations += 1;
        trace.push(simplex[0].1);

        let fbest = simplex[0].1;
        let fworst = simplex[n].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if fbest.is_finite()
            && (fworst - fbest).abs() <= opts.ftol * (fbest.abs() + opts.ftol)
            && size <= opts.xtol
        {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(rho * alpha);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&item.0)
                        .map(|(b, xi)| b + sigma * (xi - b))
                        .collect();
                    let fx = eval(&x, &mut evals);
                    *item = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    OptimResult {
        x,
        f: fx,
        iterations,
        evaluations: evals,
        grad_norm: f64::NAN,
        converged,
        trace,
    }
}

/// Central-difference gradient with per-coordinate step `h·max(1, |x_i|)`.
pub fn central_gradient<F>(f: &mut F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let step = h * x[i].abs().max(1.0);
        xp[i] = x[i] + step;
        let fp = f(&xp);
        xp[i] = x[i] - step;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    g
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    pub grad_tol: f64,
    pub ftol: f64,
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            grad_tol: 1e-4,
            ftol: 1e-12,
            fd_step: 1e-5,
        }
    }
}

/// Quasi-Newton minimization; `converged` means the gradient norm fell below
/// `grad_tol`.
pub fn bfgs<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut obj = |x: &[f64]| {
        evals += 1;
        sanitize(f(x))
    };

    let mut x = x0.to_vec();
    let mut fx = obj(&x);
    let mut trace = vec![fx];
    if !fx.is_finite() {
        return OptimResult {
            x,
            f: fx,
            iterations: 0,
            evaluations: evals,
            grad_norm: f64::INFINITY,
            converged: false,
            trace,
        };
    }
    let mut g = central_gradient(&mut obj, &x, opts.fd_step);
    let mut hinv = vec![vec![0.0; n]; n];
    for (i, row) in hinv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut first = true;
    let mut iterations = 0;
    let mut stalls = 0;

    while iterations < opts.max_iterations {
        let gn = norm(&g);
        if gn < opts.grad_tol || !gn.is_finite() {
            break;
        }
        iterations += 1;

        let mut d: Vec<f64> = (0..n)
            .map(|i| -(0..n).map(|j| hinv[i][j] * g[j]).sum::<f64>())
            .collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            // Not a descent direction: reset to steepest descent.
            for (i, row) in hinv.iter_mut().enumerate() {
                row.iter_mut().for_each(|v| *v = 0.0);
                row[i] = 1.0;
            }
            d = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
            first = true;
        }
        // Keep the first trial step modest in the unconstrained space.
        let dn = norm(&d);
        let mut step = if first {
            (1.0f64).min(1.0 / dn.max(1e-12))
        } else {
            1.0
        };
        if dn * step > 5.0 {
            step = 5.0 / dn;
        }

        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let fnew = obj(&xn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            break;
        };
        let gnew = central_gradient(&mut obj, &xn, opts.fd_step);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-14 * norm(&s) * norm(&y) && sy > 0.0 {
            if first {
                let yy: f64 = y.iter().map(|v| v * v).sum();
                let scale = sy / yy;
                for (i, row) in hinv.iter_mut().enumerate() {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    row[i] = scale;
                }
                first = false;
            }
            let hy: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| hinv[i][j] * y[j]).sum())
                .collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    hinv[i][j] +=
                        rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
        }
        let improvement = fx - fnew;
        x = xn;
        fx = fnew;
        g = gnew;
        trace.push(fx);
        if improvement.abs() <= opts.ftol * (fx.abs() + 1e-300) {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    let grad_norm = norm(&g);
    OptimResult {
        x,
        f: fx,
        iterations,
        evaluations: evals,
        grad_norm,
        converged: grad_norm < opts.grad_tol,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions {
                max_evaluations: 5000,
                ftol: 1e-14,
                xtol: 1e-8,
                initial_step: 0.5,
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn bfgs_rosenbrock() {
        let r = bfgs(
            rosenbrock,
            &[-1.2, 1.0],
            &BfgsOptions {
                max_iterations: 500,
                grad_tol: 1e-7,
                ..Default::default()
            },
        );
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bfgs_respects_infeasible_region() {
        // log barrier: infinite for x <= 0.
        let f = |x: &[f64]| {
            if x[0] <= 0.0 {
                f64::INFINITY
            } else {
                x[0] - 2.0 * x[0].ln()
            }
        };
        let r = bfgs(f, &[5.0], &BfgsOptions::default());
        assert!((r.x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn gradient_matches_analytic() {
        let mut f = |x: &[f64]| x[0].sin() * x[1].exp();
        let g = central_gradient(&mut f, &[0.3, -0.2], 1e-5);
        assert!((g[0] - 0.3f64.cos() * (-0.2f64).exp()).abs() < 1e-9);
        assert!((g[1] - 0.3f64.sin() * (-0.2f64).exp()).abs() < 1e-9);
    }
}
