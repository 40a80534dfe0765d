//! Damped Newton iteration for small square systems of complex analytic
//! equations, with a finite-difference Jacobian.
//!
//! Row scales may be supplied to precondition badly scaled residuals (for
//! instance characteristic values that grow like `cosh` of the unknowns). The
//! scales are recomputed from the current iterate and then held fixed while
//! the Jacobian is formed, so each linearized system is still that of an
//! analytic map.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Tuning knobs for [`complex_newton`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonSettings {
    /// Iteration budget.
    pub max_iter: usize,
    /// Convergence threshold on the scaled residual norm.
    pub tol_residual: f64,
    /// Convergence threshold on the relative step size.
    pub tol_step: f64,
    /// Relative finite-difference increment for the Jacobian.
    pub fd_step: f64,
    /// Optional absolute cap on the step norm; tames early iterations that
    /// would otherwise overflow `cosh`-like residuals.
    pub step_cap: Option<f64>,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            max_iter: 80,
            tol_residual: 1e-12,
            tol_step: 1e-13,
            fd_step: 1e-6,
            step_cap: None,
        }
    }
}

/// Converged iterate with diagnostics.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// Scaled residual norm at the accepted iterate.
    pub residual: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum NewtonError {
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("residual became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize },
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Per-equation scale map: takes the current iterate, returns positive row
/// scales dividing each residual entry.
pub type RowScaleFn<'a> = dyn Fn(&[Complex64]) -> Vec<f64> + 'a;

/// Solves `f(x) = 0` for analytic `f: C^d -> C^d` starting from `x0`.
///
/// `row_scale` maps the current iterate to per-equation positive scales; the
/// residual entering both the convergence test and the linear solve is
/// `f_i(x) / s_i`. Pass `None` for unscaled equations.
pub fn complex_newton<F>(
    f: F,
    row_scale: Option<&RowScaleFn<'_>>,
    x0: &[Complex64],
    settings: &NewtonSettings,
) -> Result<NewtonSolution, NewtonError>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut last_res = f64::INFINITY;
    for iter in 0..settings.max_iter {
        let scales = match row_scale {
            Some(s) => s(&x),
            None => vec![1.0; d],
        };
        let fx_raw = f(&x);
        debug_assert_eq!(fx_raw.len(), d, "residual dimension mismatch");
        let fx: Vec<Complex64> = fx_raw
            .iter()
            .zip(&scales)
            .map(|(r, s)| r / s.max(f64::MIN_POSITIVE))
            .collect();
        let res = norm(&fx);
        if !res.is_finite() {
            return Err(NewtonError::NonFinite { iteration: iter });
        }
        last_res = res;
        if res <= settings.tol_residual {
            return Ok(NewtonSolution {
                x,
                iterations: iter,
                residual: res,
            });
        }
        // Forward-difference Jacobian of the scaled residual, one column per unknown.
        let mut jac = DMatrix::<Complex64>::zeros(d, d);
        for col in 0..d {
            let h = settings.fd_step * (1.0 + x[col].norm());
            let mut xp = x.clone();
            xp[col] += Complex64::new(h, 0.0);
            let fp = f(&xp);
            for row in 0..d {
                jac[(row, col)] =
                    (fp[row] / scales[row].max(f64::MIN_POSITIVE) - fx[row]) / h;
            }
        }
        let rhs = DVector::from_iterator(d, fx.iter().map(|z| -z));
        let lu = jac.lu();
        let step = match lu.solve(&rhs) {
            Some(s) => s,
            None => return Err(NewtonError::SingularJacobian { iteration: iter }),
        };
        let mut step: Vec<Complex64> = step.iter().copied().collect();
        if let Some(cap) = settings.step_cap {
            let sn = norm(&step);
            if sn > cap {
                let shrink = cap / sn;
                for s in &mut step {
                    *s *= shrink;
                }
            }
        }
        let step_norm = norm(&step);
        for i in 0..d {
            x[i] += step[i];
        }
        if step_norm <= settings.tol_step * (1.0 + norm(&x)) {
            // Accept on a stagnating step; report the residual at the new point.
            let scales = match row_scale {
                Some(s) => s(&x),
                None => vec![1.0; d],
            };
            let res = norm(
                &f(&x)
                    .iter()
                    .zip(&scales)
                    .map(|(r, s)| r / s.max(f64::MIN_POSITIVE))
                    .collect::<Vec<_>>(),
            );
            if res <= settings.tol_residual.max(1e-9) {
                return Ok(NewtonSolution {
                    x,
                    iterations: iter + 1,
                    residual: res,
                });
            }
        }
    }
    Err(NewtonError::NonConvergence {
        iterations: settings.max_iter,
        residual: last_res,
    })
}
