//! Independent verification: forward re-simulation of a converged plan with
//! a fine fixed-step RK4 through the raw switched dynamics.

use crate::direct::DirectSolution;
use crate::error::SolveError;
use crate::indirect::IndirectSolution;
use crate::model::Coefficients;
use crate::numerics::{integrate, IntegratorConfig};
use crate::real::Real;
use crate::scenario::Scenario;

/// Terminal state of a re-simulation and its error against the target.
#[derive(Debug, Clone, Copy)]
pub struct ResimResult {
    pub s_end: f64,
    pub v_end: f64,
    pub s_err: f64,
    pub v_err: f64,
}

fn steps_for<R: Real>(span: R, dt: f64) -> usize {
    ((span.as_f64() / dt).ceil() as usize).max(1)
}

fn coast_leg<R: Real>(
    x0: [R; 2],
    t0: R,
    t1: R,
    u: R,
    c: &Coefficients<R>,
    dt: f64,
) -> Result<[R; 2], SolveError> {
    if (t1 - t0).as_f64() <= 0.0 {
        return Ok(x0);
    }
    let (c_air, a_alpha) = (c.c_air, c.a_alpha);
    let end = integrate(
        move |_t, x: &[R]| vec![x[1], -c_air * x[1] * x[1] - a_alpha + u],
        &x0,
        t0,
        t1,
        &IntegratorConfig {
            steps: steps_for(t1 - t0, dt),
        },
    )?;
    Ok([end[0], end[1]])
}

/// Re-simulate an indirect plan from (0, v0): plain switched dynamics for
/// both coasts, the coupled state/costate ODE for braking, starting from the
/// costate anchor at t_s2.
pub fn resimulate_indirect<R: Real>(
    sol: &IndirectSolution<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    dt: f64,
) -> Result<ResimResult, SolveError> {
    let t = sol.times;
    let x1 = coast_leg([R::zero(), scn.v0], R::zero(), t.t_s1, R::zero(), c, dt)?;
    let x2 = coast_leg(x1, t.t_s1, t.t_s2, -scn.a_eng(), c, dt)?;
    let lambda0 = if sol.reduced_two_phase {
        R::zero()
    } else {
        R::two() * scn.w_u * scn.a_eng()
    };
    let (c_air, a_alpha) = (c.c_air, c.a_alpha);
    let (w_u, lambda_s) = (scn.w_u, sol.lambda_s);
    let end = integrate(
        move |_t, x: &[R]| {
            let (v, lam) = (x[1], x[2]);
            vec![
                v,
                -c_air * v * v - a_alpha - lam / w_u,
                -lambda_s + R::two() * c_air * v * lam,
            ]
        },
        &[x2[0], x2[1], lambda0],
        t.t_s2,
        t.t_f,
        &IntegratorConfig {
            steps: steps_for(t.t_f - t.t_s2, dt),
        },
    )?;
    Ok(ResimResult {
        s_end: end[0].as_f64(),
        v_end: end[1].as_f64(),
        s_err: (end[0] - scn.distance_to_target).as_f64(),
        v_err: (end[1] - scn.v_f).as_f64(),
    })
}

/// Re-simulate a direct plan, applying u = -u_m v + u_n as feedback during
/// braking.
pub fn resimulate_direct<R: Real>(
    sol: &DirectSolution<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    dt: f64,
) -> Result<ResimResult, SolveError> {
    let (t_s1, t_s2, t_f) = sol.times();
    let x1 = coast_leg([R::zero(), scn.v0], R::zero(), t_s1, R::zero(), c, dt)?;
    let x2 = coast_leg(x1, t_s1, t_s2, -scn.a_eng(), c, dt)?;
    let (c_air, a_alpha) = (c.c_air, c.a_alpha);
    let law = sol.law;
    let end = integrate(
        move |_t, x: &[R]| {
            let v = x[1];
            vec![v, -c_air * v * v - a_alpha + law.command(v)]
        },
        &[x2[0], x2[1]],
        t_s2,
        t_f,
        &IntegratorConfig {
            steps: steps_for(t_f - t_s2, dt),
        },
    )?;
    Ok(ResimResult {
        s_end: end[0].as_f64(),
        v_end: end[1].as_f64(),
        s_err: (end[0] - scn.distance_to_target).as_f64(),
        v_err: (end[1] - scn.v_f).as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::{solve_direct, DirectConfig};
    use crate::indirect::{solve_indirect, IndirectConfig};

    #[test]
    fn both_methods_land_on_target_under_fine_rk4() {
        let scn = Scenario::<f64>::case_study();
        let c = scn.coefficients().unwrap();

        let ind = solve_indirect(&scn, &IndirectConfig::default(), None).unwrap();
        let r = resimulate_indirect(&ind, &scn, &c, 1e-3).unwrap();
        assert!(r.s_err.abs() < 0.1, "indirect s_err = {}", r.s_err);
        assert!(r.v_err.abs() < 0.01, "indirect v_err = {}", r.v_err);

        let dir = solve_direct(&scn, &DirectConfig::default(), None).unwrap();
        let r = resimulate_direct(&dir, &scn, &c, 1e-3).unwrap();
        assert!(r.s_err.abs() < 0.1, "direct s_err = {}", r.s_err);
        assert!(r.v_err.abs() < 0.01, "direct v_err = {}", r.v_err);
    }
}
