//! Fixed-step classical 4th-order Runge-Kutta integration.
//!
//! Trajectories here are short and smooth within a phase, so a fixed step
//! keeps oracle tests deterministic.

use crate::error::NumericsError;
use crate::real::Real;

/// Configuration for the fixed-step integrator.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Number of RK4 steps over the span.
    pub steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { steps: 400 }
    }
}

fn rk4_step<R: Real, F>(rhs: &F, t: R, x: &[R], h: R) -> Vec<R>
where
    F: Fn(R, &[R]) -> Vec<R>,
{
    let n = x.len();
    let k1 = rhs(t, x);
    let mut tmp: Vec<R> = (0..n).map(|i| x[i] + h * R::half() * k1[i]).collect();
    let k2 = rhs(t + h * R::half(), &tmp);
    for i in 0..n {
        tmp[i] = x[i] + h * R::half() * k2[i];
    }
    let k3 = rhs(t + h * R::half(), &tmp);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    let k4 = rhs(t + h, &tmp);
    let sixth = R::of(1.0 / 6.0);
    (0..n)
        .map(|i| x[i] + h * sixth * (k1[i] + R::two() * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// Integrate `rhs` from `t0` to `t1` and return the final state.
pub fn integrate<R: Real, F>(
    rhs: F,
    x0: &[R],
    t0: R,
    t1: R,
    cfg: &IntegratorConfig,
) -> Result<Vec<R>, NumericsError>
where
    F: Fn(R, &[R]) -> Vec<R>,
{
    let dense = integrate_dense(rhs, x0, t0, t1, cfg)?;
    Ok(dense.into_iter().last().expect("at least one sample").1)
}

/// Integrate and return every step, including the initial point.
pub fn integrate_dense<R: Real, F>(
    rhs: F,
    x0: &[R],
    t0: R,
    t1: R,
    cfg: &IntegratorConfig,
) -> Result<Vec<(R, Vec<R>)>, NumericsError>
where
    F: Fn(R, &[R]) -> Vec<R>,
{
    assert!(cfg.steps >= 1, "integrator needs at least one step");
    let steps = cfg.steps;
    let h = (t1 - t0) / R::of(steps as f64);
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    let mut t = t0;
    out.push((t, x.clone()));
    for k in 0..steps {
        x = rk4_step(&rhs, t, &x, h);
        t = t0 + (t1 - t0) * R::of((k + 1) as f64) / R::of(steps as f64);
        if x.iter().any(|xi| !xi.is_finite()) {
            return Err(NumericsError::NonFiniteState { t: t.as_f64() });
        }
        out.push((t, x.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_is_identity() {
        let cfg = IntegratorConfig { steps: 10 };
        let x = integrate(|_t, _x: &[f64]| vec![0.0], &[3.5], 0.0, 1.0, &cfg).unwrap();
        assert_eq!(x[0], 3.5);
    }

    #[test]
    fn exponential_to_1e10() {
        let cfg = IntegratorConfig { steps: 10_000 };
        let x = integrate(|_t, x: &[f64]| vec![x[0]], &[1.0], 0.0, 1.0, &cfg).unwrap();
        assert!((x[0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn halving_step_gains_order_four() {
        let err = |steps: usize| {
            let cfg = IntegratorConfig { steps };
            let x = integrate(|_t, x: &[f64]| vec![x[0]], &[1.0], 0.0, 1.0, &cfg).unwrap();
            (x[0] - std::f64::consts::E).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 12.0 && ratio < 20.0, "order ratio {}", ratio);
    }

    #[test]
    fn divergence_reported_as_non_finite() {
        let cfg = IntegratorConfig { steps: 50 };
        let res = integrate(|_t, x: &[f64]| vec![x[0] * x[0]], &[1e3], 0.0, 10.0, &cfg);
        assert!(matches!(res, Err(NumericsError::NonFiniteState { .. })));
    }
}
