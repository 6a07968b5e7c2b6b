//! Indirect solver: Hamiltonian machinery, costate boundary conditions,
//! lambda_s elimination, time-normalized single shooting over the switching
//! and final times, and trajectory extraction.

use crate::analytic::{
    coast_chain, coast_costate, coast_velocity, CoastChain, CoastPhaseSpec,
};
use crate::error::SolveError;
use crate::model::{Coefficients, Mode};
use crate::numerics::{integrate_dense, newton_solve, IntegratorConfig, NewtonConfig};
use crate::real::Real;
use crate::scenario::{CostTerms, Scenario};
use crate::trajectory::{Trajectory, TrajectoryRow};

/// Two kinks between engaged coasting are allowed to collapse.
const DEGENERATE_DV: f64 = 1e-9;

/// Switching and final times of a plan, measured from t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchTimes<R> {
    pub t_s1: R,
    pub t_s2: R,
    pub t_f: R,
}

impl<R: Real> SwitchTimes<R> {
    pub fn durations(&self) -> (R, R, R) {
        (
            self.t_s1,
            self.t_s2 - self.t_s1,
            self.t_f - self.t_s2,
        )
    }

    fn ordered(&self, tol: R) -> bool {
        self.t_s1 >= -tol && self.t_s2 >= self.t_s1 - tol && self.t_f >= self.t_s2 - tol
    }
}

/// One sample of the braking arc (augmented state of the BVP).
#[derive(Debug, Clone, Copy)]
pub struct BrakeSample<R> {
    pub t: R,
    pub s: R,
    pub v: R,
    pub lambda_v: R,
}

/// Recomputed optimality-condition residuals at the converged solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndirectDiagnostics {
    /// Infinity norm of the scaled shooting residual.
    pub shoot_residual_inf: f64,
    /// lambda_v at t_s1 (zero by the transition condition).
    pub lambda_v_ts1: f64,
    /// Hamiltonian jump across the first switch.
    pub h_jump_ts1: f64,
    /// Hamiltonian jump across the second switch.
    pub h_jump_ts2: f64,
    /// Hamiltonian at the free final time.
    pub h_tf: f64,
    /// Terminal position error [m].
    pub terminal_s_err: f64,
    /// Terminal velocity error [m/s].
    pub terminal_v_err: f64,
    /// Braking command at t_s2 (should equal -2 a_eng in the 3-phase case).
    pub u_at_ts2: f64,
    /// Worst undershoot of u below u_min over the braking arc (>= 0).
    pub u_min_violation: f64,
}

#[derive(Debug, Clone)]
pub struct IndirectSolution<R> {
    pub times: SwitchTimes<R>,
    pub lambda_s: R,
    pub lambda_v_tf: R,
    /// True when the engaged coast degenerated and the reduced Q1 -> Q3
    /// problem was solved instead.
    pub reduced_two_phase: bool,
    pub q1: CoastPhaseSpec<R>,
    pub q2: CoastPhaseSpec<R>,
    pub brake_dense: Vec<BrakeSample<R>>,
    pub cost: CostTerms<R>,
    pub diagnostics: IndirectDiagnostics,
}

#[derive(Debug, Clone, Copy)]
pub struct IndirectConfig {
    pub newton: NewtonConfig,
    pub integrator: IntegratorConfig,
    /// Steps of the dense output pass after convergence.
    pub dense_steps: usize,
}

impl Default for IndirectConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig {
                tol_residual: 1e-11,
                max_iters: 80,
                fd_step: 1e-6,
                damping: 0.5,
            },
            integrator: IntegratorConfig { steps: 800 },
            dense_steps: 2000,
        }
    }
}

/// System Hamiltonian H_q = lambda_s v + lambda_v (-c_air v^2 - a_alpha + u) + l_q,
/// with l_q = w_t while coasting and w_u u^2 / 2 + w_t while braking.
pub fn hamiltonian<R: Real>(
    mode: Mode,
    v: R,
    lambda_s: R,
    lambda_v: R,
    u: R,
    c: &Coefficients<R>,
    w_u: R,
    w_t: R,
) -> R {
    let f_v = -c.c_air * v * v - c.a_alpha + u;
    let l = match mode {
        Mode::Q3Brake => w_u * u * u * R::half() + w_t,
        _ => w_t,
    };
    lambda_s * v + lambda_v * f_v + l
}

/// Stationarity of H_q3 in u: u* = -lambda_v / w_u.
pub fn optimal_brake_control<R: Real>(lambda_v: R, w_u: R) -> R {
    -lambda_v / w_u
}

/// Terminal costate from the free-final-time condition H_q3(t_f) = 0:
/// lambda_v(t_f) = -w_u A + sqrt(w_u^2 A^2 + 2 w_u (w_t + lambda_s v_f)),
/// A = c_air v_f^2 + a_alpha.
pub fn terminal_lambda_v<R: Real>(
    lambda_s: R,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<R, SolveError> {
    let a = c.c_air * scn.v_f * scn.v_f + c.a_alpha;
    let disc = scn.w_u * scn.w_u * a * a + R::two() * scn.w_u * (scn.w_t + lambda_s * scn.v_f);
    if disc < R::zero() {
        return Err(SolveError::NegativeDiscriminant {
            disc: disc.as_f64(),
        });
    }
    Ok(-scn.w_u * a + disc.sqrt())
}

/// Eliminate lambda_s from the t_s1 transition condition: evaluating the
/// engaged-coast costate closed form at t_s1 and requiring lambda_v(t_s1) = 0
/// gives 0 = lambda_s (v(t_s1) - v(t_s2)) + 2 w_u a_eng D(v(t_s2)).
pub fn lambda_s_of_times<R: Real>(
    times: &SwitchTimes<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<R, SolveError> {
    let chain = coast_chain(scn.v0, times.t_s1, times.t_s2, c, scn.a_eng())?;
    lambda_s_of_chain(&chain, scn, c)
}

fn lambda_s_of_chain<R: Real>(
    chain: &CoastChain<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<R, SolveError> {
    let dv = chain.v_s1 - chain.v_s2;
    if dv.abs() < R::of(DEGENERATE_DV) {
        return Err(SolveError::DegenerateTimes);
    }
    let a_eng = scn.a_eng();
    let d_s2 = c.c_air * chain.v_s2 * chain.v_s2 + c.a_alpha + a_eng;
    Ok(-R::two() * scn.w_u * a_eng * d_s2 / dv)
}

/// Shooting residual of the time-normalized BVP for given times, scaled by
/// (s_f, v_f, 1). The braking state starts from the stitched coast endpoint
/// with lambda_v(t_s2) = 2 w_u a_eng imposed exactly.
pub fn shoot<R: Real>(
    times: &SwitchTimes<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    integ: &IntegratorConfig,
) -> Result<[R; 3], SolveError> {
    let chain = coast_chain(scn.v0, times.t_s1, times.t_s2, c, scn.a_eng())?;
    let lambda_s = lambda_s_of_chain(&chain, scn, c)?;
    let lambda_ts2 = R::two() * scn.w_u * scn.a_eng();
    let end = integrate_brake(
        &[chain.s_s2, chain.v_s2, lambda_ts2, R::zero()],
        times.t_f - times.t_s2,
        lambda_s,
        scn,
        c,
        integ.steps,
    )?
    .into_iter()
    .last()
    .expect("dense output nonempty")
    .1;
    let lambda_tf = terminal_lambda_v(lambda_s, scn, c)?;
    Ok([
        (end[0] - scn.distance_to_target) / scn.distance_to_target,
        (end[1] - scn.v_f) / scn.v_f,
        end[2] - lambda_tf,
    ])
}

/// Integrate the braking BVP state [s, v, lambda_v, J_u] over tau in [0, 1].
fn integrate_brake<R: Real>(
    xi0: &[R],
    span: R,
    lambda_s: R,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    steps: usize,
) -> Result<Vec<(R, Vec<R>)>, SolveError> {
    let w_u = scn.w_u;
    let (c_air, a_alpha) = (c.c_air, c.a_alpha);
    let rhs = move |_tau: R, x: &[R]| {
        let v = x[1];
        let lam = x[2];
        vec![
            span * v,
            span * (-c_air * v * v - a_alpha - lam / w_u),
            span * (-lambda_s + R::two() * c_air * v * lam),
            span * (lam * lam / (R::two() * w_u)),
        ]
    };
    Ok(integrate_dense(
        rhs,
        xi0,
        R::zero(),
        R::one(),
        &IntegratorConfig { steps },
    )?)
}

fn default_guess<R: Real>(scn: &Scenario<R>) -> SwitchTimes<R> {
    // Coasting dominates optimal eco-braking, so most of the horizon is Q1.
    let t_f = scn.distance_to_target / ((scn.v0 + scn.v_f) * R::half());
    SwitchTimes {
        t_s1: R::of(0.6) * t_f,
        t_s2: R::of(0.85) * t_f,
        t_f,
    }
}

/// Solve the switched OCP via single shooting over (t_s1, t_s2, t_f).
///
/// Falls over to the reduced two-phase (Q1 -> Q3) problem when the engaged
/// coast degenerates, in which case lambda_s joins the unknowns and the
/// costate anchor at the single switch is lambda_v = 0.
pub fn solve_indirect<R: Real>(
    scn: &Scenario<R>,
    cfg: &IndirectConfig,
    guess: Option<SwitchTimes<R>>,
) -> Result<IndirectSolution<R>, SolveError> {
    scn.validate()?;
    let c = scn.coefficients()?;
    let g = guess.unwrap_or_else(|| default_guess(scn));

    let three_phase = newton_solve(
        |x: &[R]| {
            let t = SwitchTimes {
                t_s1: x[0],
                t_s2: x[1],
                t_f: x[2],
            };
            shoot(&t, scn, &c, &cfg.integrator).ok().map(|r| r.to_vec())
        },
        &[g.t_s1, g.t_s2, g.t_f],
        &cfg.newton,
    );

    match three_phase {
        Ok(x) => {
            let times = SwitchTimes {
                t_s1: x[0],
                t_s2: x[1],
                t_f: x[2],
            };
            if !times.ordered(R::of(1e-9)) {
                // A collapsed engaged coast shows up as t_s1 crossing t_s2.
                if times.t_s1 > times.t_s2 - R::of(1e-6) {
                    return solve_two_phase(scn, &c, cfg, &g);
                }
                return Err(SolveError::InfeasibleOrdering {
                    t_s1: times.t_s1.as_f64(),
                    t_s2: times.t_s2.as_f64(),
                    t_f: times.t_f.as_f64(),
                });
            }
            if times.t_s2 - times.t_s1 < R::of(1e-6) {
                return solve_two_phase(scn, &c, cfg, &g);
            }
            assemble_solution(scn, &c, cfg, times, None)
        }
        Err(_) => solve_two_phase(scn, &c, cfg, &g),
    }
}

/// Reduced Q1 -> Q3 problem: unknowns (t_s, t_f, lambda_s), costate anchor
/// lambda_v(t_s) = 0.
fn solve_two_phase<R: Real>(
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    cfg: &IndirectConfig,
    guess: &SwitchTimes<R>,
) -> Result<IndirectSolution<R>, SolveError> {
    let residual = |x: &[R]| -> Option<Vec<R>> {
        let (t_s, t_f, lambda_s) = (x[0], x[1], x[2]);
        let q1 = CoastPhaseSpec::new(
            Mode::Q1DisengagedCoast,
            R::zero(),
            R::zero(),
            scn.v0,
            c,
            scn.a_eng(),
        );
        let v_s = coast_velocity(&q1, t_s).ok()?;
        let s_s = crate::analytic::coast_distance(&q1, t_s).ok()?;
        let end = integrate_brake(
            &[s_s, v_s, R::zero(), R::zero()],
            t_f - t_s,
            lambda_s,
            scn,
            c,
            cfg.integrator.steps,
        )
        .ok()?
        .into_iter()
        .last()?
        .1;
        let lambda_tf = terminal_lambda_v(lambda_s, scn, c).ok()?;
        Some(vec![
            (end[0] - scn.distance_to_target) / scn.distance_to_target,
            (end[1] - scn.v_f) / scn.v_f,
            end[2] - lambda_tf,
        ])
    };
    let x = newton_solve(
        residual,
        &[guess.t_s1, guess.t_f, R::zero()],
        &cfg.newton,
    )?;
    let times = SwitchTimes {
        t_s1: x[0],
        t_s2: x[0],
        t_f: x[1],
    };
    if !times.ordered(R::of(1e-9)) {
        return Err(SolveError::InfeasibleOrdering {
            t_s1: times.t_s1.as_f64(),
            t_s2: times.t_s2.as_f64(),
            t_f: times.t_f.as_f64(),
        });
    }
    assemble_solution(scn, c, cfg, times, Some(x[2]))
}

/// Dense output, cost decomposition, and recomputed optimality residuals.
/// `two_phase_lambda_s` carries the solved multiplier in the reduced case.
fn assemble_solution<R: Real>(
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    cfg: &IndirectConfig,
    times: SwitchTimes<R>,
    two_phase_lambda_s: Option<R>,
) -> Result<IndirectSolution<R>, SolveError> {
    let reduced = two_phase_lambda_s.is_some();
    let chain = coast_chain(scn.v0, times.t_s1, times.t_s2, c, scn.a_eng())?;
    let lambda_s = match two_phase_lambda_s {
        Some(l) => l,
        None => lambda_s_of_chain(&chain, scn, c)?,
    };
    let lambda_ts2 = if reduced {
        R::zero()
    } else {
        R::two() * scn.w_u * scn.a_eng()
    };

    let span = times.t_f - times.t_s2;
    let dense = integrate_brake(
        &[chain.s_s2, chain.v_s2, lambda_ts2, R::zero()],
        span,
        lambda_s,
        scn,
        c,
        cfg.dense_steps,
    )?;
    let brake_dense: Vec<BrakeSample<R>> = dense
        .iter()
        .map(|(tau, x)| BrakeSample {
            t: times.t_s2 + span * *tau,
            s: x[0],
            v: x[1],
            lambda_v: x[2],
        })
        .collect();
    let end = &dense.last().expect("dense output nonempty").1;
    let j_u = end[3];
    let j_t = scn.w_t * times.t_f;
    let cost = CostTerms {
        j_u,
        j_t,
        j: j_u + j_t,
    };

    // Recompute the optimality conditions independently of the solve.
    let w_u = scn.w_u;
    let w_t = scn.w_t;
    let lambda_v_ts1 = if reduced {
        R::zero()
    } else {
        coast_costate(&chain.q2, lambda_s, lambda_ts2, times.t_s2, times.t_s1)?
    };
    let h_q1_ts1 = hamiltonian(
        Mode::Q1DisengagedCoast,
        chain.v_s1,
        lambda_s,
        lambda_v_ts1,
        R::zero(),
        c,
        w_u,
        w_t,
    );
    let h_q2_ts1 = hamiltonian(
        Mode::Q2EngagedCoast,
        chain.v_s1,
        lambda_s,
        lambda_v_ts1,
        -scn.a_eng(),
        c,
        w_u,
        w_t,
    );
    let u_ts2 = optimal_brake_control(lambda_ts2, w_u);
    let coast_u_ts2 = if reduced { R::zero() } else { -scn.a_eng() };
    let coast_mode_ts2 = if reduced {
        Mode::Q1DisengagedCoast
    } else {
        Mode::Q2EngagedCoast
    };
    let h_coast_ts2 = hamiltonian(
        coast_mode_ts2,
        chain.v_s2,
        lambda_s,
        lambda_ts2,
        coast_u_ts2,
        c,
        w_u,
        w_t,
    );
    let h_q3_ts2 = hamiltonian(
        Mode::Q3Brake,
        chain.v_s2,
        lambda_s,
        lambda_ts2,
        u_ts2,
        c,
        w_u,
        w_t,
    );
    let h_tf = hamiltonian(
        Mode::Q3Brake,
        end[1],
        lambda_s,
        end[2],
        optimal_brake_control(end[2], w_u),
        c,
        w_u,
        w_t,
    );
    let u_min = scn.vehicle.u_min;
    let u_min_violation = brake_dense
        .iter()
        .map(|smp| (u_min - optimal_brake_control(smp.lambda_v, w_u)).max(R::zero()))
        .fold(R::zero(), R::max);
    let shoot_res = [
        ((end[0] - scn.distance_to_target) / scn.distance_to_target).as_f64(),
        ((end[1] - scn.v_f) / scn.v_f).as_f64(),
        (end[2] - terminal_lambda_v(lambda_s, scn, c)?).as_f64(),
    ];

    Ok(IndirectSolution {
        times,
        lambda_s,
        lambda_v_tf: end[2],
        reduced_two_phase: reduced,
        q1: chain.q1,
        q2: chain.q2,
        brake_dense,
        cost,
        diagnostics: IndirectDiagnostics {
            shoot_residual_inf: shoot_res.iter().fold(0.0f64, |m, r| m.max(r.abs())),
            lambda_v_ts1: lambda_v_ts1.as_f64(),
            h_jump_ts1: (h_q2_ts1 - h_q1_ts1).as_f64(),
            h_jump_ts2: (h_q3_ts2 - h_coast_ts2).as_f64(),
            h_tf: h_tf.as_f64(),
            terminal_s_err: (end[0] - scn.distance_to_target).as_f64(),
            terminal_v_err: (end[1] - scn.v_f).as_f64(),
            u_at_ts2: u_ts2.as_f64(),
            u_min_violation: u_min_violation.as_f64(),
        },
    })
}

impl<R: Real> IndirectSolution<R> {
    /// Interpolate the dense braking arc at time `t`.
    fn brake_at(&self, t: R) -> BrakeSample<R> {
        let first = self.brake_dense.first().expect("dense arc");
        let last = self.brake_dense.last().expect("dense arc");
        if t <= first.t {
            return *first;
        }
        if t >= last.t {
            return *last;
        }
        let n = self.brake_dense.len() - 1;
        let frac =
            ((t - first.t) / (last.t - first.t)).as_f64() * n as f64;
        let i = (frac.floor() as usize).min(n - 1);
        let a = self.brake_dense[i];
        let b = self.brake_dense[i + 1];
        let w = (t - a.t) / (b.t - a.t);
        BrakeSample {
            t,
            s: a.s + (b.s - a.s) * w,
            v: a.v + (b.v - a.v) * w,
            lambda_v: a.lambda_v + (b.lambda_v - a.lambda_v) * w,
        }
    }
}

/// Sample the converged plan at step `dt` (plus the exact final time).
pub fn extract_trajectory<R: Real>(
    sol: &IndirectSolution<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    dt: R,
) -> Trajectory<R> {
    let mut rows = Vec::new();
    let t_f = sol.times.t_f;
    let n = (t_f / dt).as_f64().floor() as usize;
    let lambda_ts2 = if sol.reduced_two_phase {
        R::zero()
    } else {
        R::two() * scn.w_u * scn.a_eng()
    };
    let mut push = |t: R| {
        let (mode, s, v, u, lam) = if t < sol.times.t_s1 && !sol.times.t_s1.is_zero() {
            let v = coast_velocity(&sol.q1, t).expect("inside validated phase");
            let s = crate::analytic::coast_distance(&sol.q1, t).expect("inside validated phase");
            let lam = coast_costate(&sol.q1, sol.lambda_s, R::zero(), sol.times.t_s1, t)
                .expect("inside validated phase");
            (Mode::Q1DisengagedCoast, s, v, R::zero(), lam)
        } else if t < sol.times.t_s2 {
            let v = coast_velocity(&sol.q2, t).expect("inside validated phase");
            let s = crate::analytic::coast_distance(&sol.q2, t).expect("inside validated phase");
            let lam = coast_costate(&sol.q2, sol.lambda_s, lambda_ts2, sol.times.t_s2, t)
                .expect("inside validated phase");
            (Mode::Q2EngagedCoast, s, v, -scn.a_eng(), lam)
        } else {
            let smp = sol.brake_at(t);
            let u = optimal_brake_control(smp.lambda_v, scn.w_u);
            (Mode::Q3Brake, smp.s, smp.v, u, smp.lambda_v)
        };
        let a = -c.c_air * v * v - c.a_alpha + u;
        rows.push(TrajectoryRow {
            t,
            mode,
            s,
            v,
            a,
            u,
            lambda_v: Some(lam),
        });
    };
    for k in 0..=n {
        push(dt * R::of(k as f64));
    }
    if dt * R::of(n as f64) < t_f - R::of(1e-12) {
        push(t_f);
    }
    Trajectory { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Scenario<f64>, Coefficients<f64>) {
        let scn = Scenario::case_study();
        let c = scn.coefficients().unwrap();
        (scn, c)
    }

    #[test]
    fn hamiltonian_costate_free_coasting_is_wt() {
        let (scn, c) = setup();
        let h = hamiltonian(
            Mode::Q1DisengagedCoast,
            30.0,
            0.0,
            0.0,
            0.0,
            &c,
            scn.w_u,
            scn.w_t,
        );
        assert_eq!(h, scn.w_t);
    }

    #[test]
    fn terminal_lambda_collapses_without_time_weight() {
        let (mut scn, c) = setup();
        scn.w_t = 1e-300; // validated positive, effectively zero
        let lam = terminal_lambda_v(0.0, &scn, &c).unwrap();
        assert!(lam.abs() < 1e-12);
    }

    #[test]
    fn control_at_ts2_is_minus_twice_a_eng() {
        let (scn, _) = setup();
        let lam = 2.0 * scn.w_u * scn.a_eng();
        let u = optimal_brake_control(lam, scn.w_u);
        assert!((u + 2.0 * scn.a_eng()).abs() < 1e-15);
        assert!((u + 0.8).abs() < 1e-12);
    }

    #[test]
    fn lambda_s_zero_without_engine_drag() {
        let (mut scn, c) = setup();
        scn.vehicle.engine_drag_decel = 0.0;
        let t = SwitchTimes {
            t_s1: 5.0,
            t_s2: 9.0,
            t_f: 12.0,
        };
        assert_eq!(lambda_s_of_times(&t, &scn, &c).unwrap(), 0.0);
    }

    #[test]
    fn lambda_s_sign_and_linear_equation_oracle() {
        let (scn, c) = setup();
        let t = SwitchTimes {
            t_s1: 7.98,
            t_s2: 10.84,
            t_f: 13.79,
        };
        let lam = lambda_s_of_times(&t, &scn, &c).unwrap();
        assert!(lam < 0.0);
        // Oracle: scalar linear equation with coast velocities from RK4.
        let chain = coast_chain(scn.v0, t.t_s1, t.t_s2, &c, scn.a_eng()).unwrap();
        let d = c.c_air * chain.v_s2 * chain.v_s2 + c.a_alpha + scn.a_eng();
        let res = lam * (chain.v_s1 - chain.v_s2) + 2.0 * scn.w_u * scn.a_eng() * d;
        assert!(res.abs() < 1e-12);
    }

    #[test]
    fn degenerate_times_are_typed() {
        let (scn, c) = setup();
        let t = SwitchTimes {
            t_s1: 8.0,
            t_s2: 8.0,
            t_f: 12.0,
        };
        assert!(matches!(
            lambda_s_of_times(&t, &scn, &c),
            Err(SolveError::DegenerateTimes)
        ));
    }

    #[test]
    fn case_study_converges_to_reference_durations() {
        let (scn, _) = setup();
        let sol = solve_indirect(&scn, &IndirectConfig::default(), None).unwrap();
        let (d1, d2, d3) = sol.times.durations();
        assert!((d1 - 7.98).abs() < 0.05, "dt_q1 = {}", d1);
        assert!((d2 - 2.86).abs() < 0.05, "dt_q2 = {}", d2);
        assert!((d3 - 2.95).abs() < 0.05, "dt_q3 = {}", d3);
        assert!((sol.cost.j - 14.01588).abs() < 0.01, "J = {}", sol.cost.j);
        assert!(!sol.reduced_two_phase);
        // Optimality-condition residuals recomputed after the solve.
        let d = &sol.diagnostics;
        assert!(d.lambda_v_ts1.abs() < 1e-6);
        assert!(d.h_jump_ts1.abs() < 1e-6);
        assert!(d.h_jump_ts2.abs() < 1e-6);
        assert!(d.h_tf.abs() < 1e-6);
        assert!((d.u_at_ts2 + 0.8).abs() < 1e-9);
        assert_eq!(d.u_min_violation, 0.0);
        // Converged multipliers against the reference solution.
        assert!((sol.lambda_s - -0.027).abs() < 0.003, "lambda_s = {}", sol.lambda_s);
        assert!((sol.lambda_v_tf - 0.166).abs() < 0.01, "lambda_v_tf = {}", sol.lambda_v_tf);
    }

    #[test]
    fn shoot_residual_small_at_convergence_and_nonzero_off_optimum() {
        let (scn, c) = setup();
        let cfg = IndirectConfig::default();
        let sol = solve_indirect(&scn, &cfg, None).unwrap();
        let r = shoot(&sol.times, &scn, &c, &cfg.integrator).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-6));
        let perturbed = SwitchTimes {
            t_f: sol.times.t_f + 0.1,
            ..sol.times
        };
        let rp = shoot(&perturbed, &scn, &c, &cfg.integrator).unwrap();
        assert!(rp.iter().fold(0.0f64, |m, x| m.max(x.abs())) > 1e-3);
    }

    #[test]
    fn lambda_v_positive_throughout_braking() {
        let (scn, _) = setup();
        let sol = solve_indirect(&scn, &IndirectConfig::default(), None).unwrap();
        for smp in sol.brake_dense.iter().skip(1) {
            assert!(smp.lambda_v > 0.0, "lambda_v = {} at t = {}", smp.lambda_v, smp.t);
        }
    }

    #[test]
    fn weight_scaling_leaves_times_invariant() {
        let (scn, _) = setup();
        let cfg = IndirectConfig::default();
        let base = solve_indirect(&scn, &cfg, None).unwrap();
        let mut scaled = scn;
        scaled.w_u *= 7.0;
        scaled.w_t *= 7.0;
        let sol = solve_indirect(&scaled, &cfg, None).unwrap();
        assert!((sol.times.t_s1 - base.times.t_s1).abs() < 1e-6);
        assert!((sol.times.t_s2 - base.times.t_s2).abs() < 1e-6);
        assert!((sol.times.t_f - base.times.t_f).abs() < 1e-6);
        assert!((sol.cost.j - 7.0 * base.cost.j).abs() < 1e-6 * base.cost.j);
    }

    #[test]
    fn trajectory_rows_well_formed() {
        let (scn, c) = setup();
        let sol = solve_indirect(&scn, &IndirectConfig::default(), None).unwrap();
        let traj = extract_trajectory(&sol, &scn, &c, 0.01);
        let first = &traj.rows[0];
        assert_eq!(first.t, 0.0);
        assert_eq!(first.mode, Mode::Q1DisengagedCoast);
        assert_eq!(first.s, 0.0);
        assert!((first.v - scn.v0).abs() < 1e-12);
        assert!((first.a - (-c.c_air * scn.v0 * scn.v0 - c.a_alpha)).abs() < 1e-12);
        assert_eq!(first.u, 0.0);
        let last = traj.rows.last().unwrap();
        assert!((last.s - 500.0).abs() < 0.1);
        assert!((last.v - scn.v_f).abs() < 0.01);
        // |a| non-decreasing across phase switches.
        for w in traj.rows.windows(2) {
            if w[0].mode != w[1].mode {
                assert!(w[1].a.abs() >= w[0].a.abs() - 1e-9);
            }
        }
        // strictly increasing time, non-decreasing s, positive v
        for w in traj.rows.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].s >= w[0].s);
            assert!(w[1].v > 0.0);
        }
    }
}
