//! Damped Newton root finding with central finite-difference Jacobians.

use crate::error::NumericsError;
use crate::numerics::linalg::solve_dense;
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct NewtonConfig {
    /// Infinity-norm tolerance on the (caller-scaled) residual.
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Relative finite-difference perturbation.
    pub fd_step: f64,
    /// Backtracking factor in (0, 1).
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_iters: 60,
            fd_step: 1e-6,
            damping: 0.5,
        }
    }
}

fn inf_norm<R: Real>(v: &[R]) -> R {
    v.iter().fold(R::zero(), |m, &x| m.max(x.abs()))
}

/// Find `x` with `residual(x) = 0`. The residual closure returns `None`
/// when an iterate is outside its domain; such steps are rejected by the
/// line search.
pub fn newton_solve<R, F>(
    mut residual: F,
    x0: &[R],
    cfg: &NewtonConfig,
) -> Result<Vec<R>, NumericsError>
where
    R: Real,
    F: FnMut(&[R]) -> Option<Vec<R>>,
{
    let n = x0.len();
    let tol = R::of(cfg.tol_residual);
    let mut x = x0.to_vec();
    let mut r = residual(&x).ok_or(NumericsError::BadInitialPoint)?;
    assert_eq!(r.len(), n, "residual dimension must match unknowns");
    let mut norm = inf_norm(&r);
    let mut best = x.clone();
    let mut best_norm = norm;

    for iter in 0..cfg.max_iters {
        if norm < tol {
            return Ok(x);
        }

        // Central-difference Jacobian; fall back to one-sided when a
        // perturbed point leaves the residual's domain.
        let mut jac = vec![vec![R::zero(); n]; n];
        for j in 0..n {
            let h = R::of(cfg.fd_step) * x[j].abs().max(R::one());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] = xp[j] + h;
            xm[j] = xm[j] - h;
            let (rp, rm, span) = match (residual(&xp), residual(&xm)) {
                (Some(rp), Some(rm)) => (rp, rm, R::two() * h),
                (Some(rp), None) => (rp, r.clone(), h),
                (None, Some(rm)) => (r.clone(), rm, h),
                (None, None) => {
                    return Err(NumericsError::NoConvergence {
                        iters: iter,
                        best: best.iter().map(|v| v.as_f64()).collect(),
                        best_norm: best_norm.as_f64(),
                    })
                }
            };
            for i in 0..n {
                jac[i][j] = (rp[i] - rm[i]) / span;
            }
        }

        let mut a = jac;
        let mut rhs: Vec<R> = r.iter().map(|&ri| -ri).collect();
        let step = solve_dense(&mut a, &mut rhs)?;

        // A Newton step at rounding level means the iterate cannot improve
        // further in this precision; accept it as converged.
        let x_scale = x.iter().fold(R::one(), |m, &v| m.max(v.abs()));
        if inf_norm(&step) < R::of(1e-13) * x_scale {
            return Ok(x);
        }

        // Backtracking line search on the residual norm.
        let mut alpha = R::one();
        let mut accepted = false;
        while alpha > R::of(1e-14) {
            let cand: Vec<R> = (0..n).map(|i| x[i] + alpha * step[i]).collect();
            if let Some(rc) = residual(&cand) {
                let nc = inf_norm(&rc);
                if nc < norm * (R::one() - R::of(1e-4) * alpha) || nc < tol {
                    x = cand;
                    r = rc;
                    norm = nc;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * R::of(cfg.damping);
        }
        if norm < best_norm {
            best = x.clone();
            best_norm = norm;
        }
        if !accepted {
            return Err(NumericsError::NoConvergence {
                iters: iter + 1,
                best: best.iter().map(|v| v.as_f64()).collect(),
                best_norm: best_norm.as_f64(),
            });
        }
    }
    if norm < tol {
        return Ok(x);
    }
    Err(NumericsError::NoConvergence {
        iters: cfg.max_iters,
        best: best.iter().map(|v| v.as_f64()).collect(),
        best_norm: best_norm.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_residual() {
        let cfg = NewtonConfig::default();
        let x = newton_solve(|x: &[f64]| Some(vec![x[0] - 3.0]), &[0.0], &cfg).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn sqrt_two() {
        let cfg = NewtonConfig::default();
        let x = newton_solve(|x: &[f64]| Some(vec![x[0] * x[0] - 2.0]), &[1.0], &cfg).unwrap();
        assert!((x[0] - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn two_dim_quadratic_with_known_root() {
        // Root constructed at (2, -1).
        let cfg = NewtonConfig::default();
        let f = |x: &[f64]| {
            Some(vec![
                (x[0] - 2.0) * (x[0] + 5.0) + (x[1] + 1.0),
                (x[1] + 1.0) * (x[1] - 3.0) + 2.0 * (x[0] - 2.0),
            ])
        };
        let x = newton_solve(f, &[1.0, 0.0], &cfg).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-8);
        assert!((x[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn scaling_invariance_of_root() {
        let cfg = NewtonConfig::default();
        let a = newton_solve(|x: &[f64]| Some(vec![x[0] * x[0] - 2.0]), &[1.0], &cfg).unwrap();
        let b =
            newton_solve(|x: &[f64]| Some(vec![1e6 * (x[0] * x[0] - 2.0)]), &[1.0], &cfg).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-8);
    }

    #[test]
    fn no_convergence_carries_best_iterate() {
        let cfg = NewtonConfig {
            max_iters: 3,
            ..NewtonConfig::default()
        };
        // x^2 + 1 has no real root.
        let res = newton_solve(|x: &[f64]| Some(vec![x[0] * x[0] + 1.0]), &[5.0], &cfg);
        match res {
            Err(NumericsError::NoConvergence { best, .. }) => assert_eq!(best.len(), 1),
            other => panic!("expected NoConvergence, got {:?}", other),
        }
    }
}
