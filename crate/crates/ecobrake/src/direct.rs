//! Direct solver: cost and constraints as closed-form functions of
//! theta = [dt_q1, dt_q2, u_m, u_n], solved as a small dense NLP.

use crate::analytic::{
    brake_distance, brake_distance_of_velocity, brake_duration, brake_velocity, coast_chain,
    BrakeLaw, BrakePhaseSpec, CoastChain, CoastPhaseSpec,
};
use crate::error::SolveError;
use crate::model::{Coefficients, Mode};
use crate::numerics::{nlp_solve, NlpConfig};
use crate::real::Real;
use crate::scenario::{CostTerms, Scenario};
use crate::trajectory::{Trajectory, TrajectoryRow};

/// Keeps sqrt(g_c) well-conditioned inside the solver.
const GC_MARGIN: f64 = 1e-8;

/// NLP parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta<R> {
    pub dt_q1: R,
    pub dt_q2: R,
    /// Feedback gain of u = -u_m v + u_n [1/s].
    pub u_m: R,
    /// Feedback offset [m/s^2].
    pub u_n: R,
}

/// Dense-grid audit of the braking command.
#[derive(Debug, Clone, Copy, Default)]
pub struct SaturationReport {
    pub u_min_cmd: f64,
    pub u_max_cmd: f64,
    /// Worst violation of u_min <= u <= 0 over the grid (>= 0).
    pub bound_violation: f64,
    /// Worst excursion beyond the endpoint values of the affine command;
    /// monotone v implies this should be numerical noise.
    pub beyond_endpoints: f64,
}

#[derive(Debug, Clone)]
pub struct DirectSolution<R> {
    pub theta: Theta<R>,
    pub dt_q3: R,
    pub law: BrakeLaw<R>,
    pub q1: CoastPhaseSpec<R>,
    pub q2: CoastPhaseSpec<R>,
    pub brake: BrakePhaseSpec<R>,
    pub cost: CostTerms<R>,
    pub g_f: R,
    pub ineq: [R; 7],
    pub saturation: SaturationReport,
    /// Stationarity residual reported by the NLP solver.
    pub stationarity: f64,
}

impl<R: Real> DirectSolution<R> {
    pub fn times(&self) -> (R, R, R) {
        (
            self.theta.dt_q1,
            self.theta.dt_q1 + self.theta.dt_q2,
            self.theta.dt_q1 + self.theta.dt_q2 + self.dt_q3,
        )
    }
}

struct BrakeSetup<R> {
    chain: CoastChain<R>,
    spec: BrakePhaseSpec<R>,
    dt_q3: R,
    /// Distance covered while braking.
    ds_q3: R,
}

fn setup<R: Real>(
    theta: &Theta<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<BrakeSetup<R>, SolveError> {
    let t_s1 = theta.dt_q1;
    let t_s2 = theta.dt_q1 + theta.dt_q2;
    let chain = coast_chain(scn.v0, t_s1, t_s2, c, scn.a_eng())?;
    let law = BrakeLaw {
        u_m: theta.u_m,
        u_n: theta.u_n,
    };
    let spec = BrakePhaseSpec::new(law, t_s2, chain.s_s2, chain.v_s2, c)?;
    let dt_q3 = brake_duration(&spec, scn.v_f)?;
    let ds_q3 = brake_distance_of_velocity(&spec, scn.v_f)? - chain.s_s2;
    Ok(BrakeSetup {
        chain,
        spec,
        dt_q3,
        ds_q3,
    })
}

/// Closed-form cost decomposition. The braking energy integral uses the
/// identities \int v dt = ds_q3 and
/// \int v^2 dt = (v(t_s2) - v_f - (a_alpha - u_n) dt_q3 - u_m ds_q3) / c_air,
/// the latter obtained by integrating the braking ODE once.
pub fn direct_cost<R: Real>(
    theta: &Theta<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<CostTerms<R>, SolveError> {
    let st = setup(theta, scn, c)?;
    let (u_m, u_n) = (theta.u_m, theta.u_n);
    let int_v = st.ds_q3;
    let int_v2 =
        (st.chain.v_s2 - scn.v_f - (c.a_alpha - u_n) * st.dt_q3 - u_m * st.ds_q3) / c.c_air;
    let j_u = scn.w_u
        * R::half()
        * (u_m * u_m * int_v2 - R::two() * u_m * u_n * int_v + u_n * u_n * st.dt_q3);
    let j_t = scn.w_t * (theta.dt_q1 + theta.dt_q2 + st.dt_q3);
    Ok(CostTerms {
        j_u,
        j_t,
        j: j_u + j_t,
    })
}

/// Terminal equality in the space domain: g_f = s_f - s_q3(v_f).
pub fn constraint_gf<R: Real>(
    theta: &Theta<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<R, SolveError> {
    let t_s1 = theta.dt_q1;
    let t_s2 = theta.dt_q1 + theta.dt_q2;
    let chain = coast_chain(scn.v0, t_s1, t_s2, c, scn.a_eng())?;
    let law = BrakeLaw {
        u_m: theta.u_m,
        u_n: theta.u_n,
    };
    let spec = BrakePhaseSpec::new(law, t_s2, chain.s_s2, chain.v_s2, c)?;
    Ok(scn.distance_to_target - brake_distance_of_velocity(&spec, scn.v_f)?)
}

/// Inequality vector (feasible when >= 0):
/// [-u(t_s2), -u(t_f), u(t_s2) - u_min, u(t_f) - u_min, g_c, dt_q1, dt_q2].
pub fn constraints_ineq<R: Real>(
    theta: &Theta<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
) -> Result<[R; 7], SolveError> {
    let t_s1 = theta.dt_q1;
    let t_s2 = theta.dt_q1 + theta.dt_q2;
    let chain = coast_chain(scn.v0, t_s1, t_s2, c, scn.a_eng())?;
    let law = BrakeLaw {
        u_m: theta.u_m,
        u_n: theta.u_n,
    };
    let u_s2 = law.command(chain.v_s2);
    let u_f = law.command(scn.v_f);
    let g_c = theta.u_m * theta.u_m - R::of(4.0) * c.c_air * (c.a_alpha - theta.u_n);
    let u_min = scn.vehicle.u_min;
    Ok([
        -u_s2,
        -u_f,
        u_s2 - u_min,
        u_f - u_min,
        g_c,
        theta.dt_q1,
        theta.dt_q2,
    ])
}

/// Initial guess: durations from the coasting-dominates heuristic, the
/// braking law sized to the mean required deceleration with enough gain
/// margin to keep g_c strictly positive.
fn default_theta<R: Real>(scn: &Scenario<R>, c: &Coefficients<R>) -> Theta<R> {
    let t_f = scn.distance_to_target / ((scn.v0 + scn.v_f) * R::half());
    let mut dt_q1 = R::of(0.6) * t_f;
    let mut dt_q2 = R::of(0.25) * t_f;
    let chain = loop {
        match coast_chain(scn.v0, dt_q1, dt_q1 + dt_q2, c, scn.a_eng()) {
            Ok(ch) if ch.v_s2 > scn.v_f * R::of(0.5) => break ch,
            _ => {
                dt_q1 = dt_q1 * R::half();
                dt_q2 = dt_q2 * R::half();
                if dt_q1 < R::of(1e-3) {
                    break coast_chain(scn.v0, R::zero(), R::zero(), c, scn.a_eng())
                        .expect("zero-length coast is always valid");
                }
            }
        }
    };
    let remaining = (scn.distance_to_target - chain.s_s2).max(R::of(1.0));
    let a_req = ((chain.v_s2 * chain.v_s2 - scn.v_f * scn.v_f) / (R::two() * remaining))
        .max(R::of(1e-3));
    let v_mid = (chain.v_s2 + scn.v_f) * R::half();
    let mut u_n = -a_req;
    let mut u_m = R::zero();
    for _ in 0..4 {
        u_m = -R::of(1.2)
            * (R::of(4.0) * c.c_air * (c.a_alpha - u_n).max(R::of(1e-9))).sqrt();
        u_n = -a_req + u_m * v_mid;
    }
    while u_m * u_m - R::of(4.0) * c.c_air * (c.a_alpha - u_n) <= R::of(GC_MARGIN) {
        u_m = u_m * R::of(1.5);
    }
    Theta {
        dt_q1,
        dt_q2,
        u_m,
        u_n,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DirectConfig {
    pub nlp: NlpConfig,
    /// Grid size of the post-solve saturation audit.
    pub audit_points: usize,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            nlp: NlpConfig::default(),
            audit_points: 512,
        }
    }
}

/// Solve the parametric NLP and audit the result.
pub fn solve_direct<R: Real>(
    scn: &Scenario<R>,
    cfg: &DirectConfig,
    guess: Option<Theta<R>>,
) -> Result<DirectSolution<R>, SolveError> {
    scn.validate()?;
    let c = scn.coefficients()?;
    let g = guess.unwrap_or_else(|| default_theta(scn, &c));

    let unpack = |x: &[R]| Theta {
        dt_q1: x[0],
        dt_q2: x[1],
        u_m: x[2],
        u_n: x[3],
    };
    let scale = [
        g.dt_q1.max(R::one()),
        g.dt_q2.max(R::one()),
        R::of(0.1),
        g.u_n.abs().max(R::one()),
    ];
    let sol = nlp_solve(
        |x| direct_cost(&unpack(x), scn, &c).ok().map(|ct| ct.j),
        |x| {
            constraint_gf(&unpack(x), scn, &c)
                .ok()
                .map(|gf| vec![gf / scn.distance_to_target])
        },
        |x| {
            constraints_ineq(&unpack(x), scn, &c).ok().map(|gi| {
                let mut v = gi.to_vec();
                v[4] = v[4] - R::of(GC_MARGIN);
                v
            })
        },
        &[g.dt_q1, g.dt_q2, g.u_m, g.u_n],
        &scale,
        &cfg.nlp,
    )?;

    let theta = unpack(&sol.x);
    let st = setup(&theta, scn, &c)?;
    let cost = direct_cost(&theta, scn, &c)?;
    let g_f = constraint_gf(&theta, scn, &c)?;
    let ineq = constraints_ineq(&theta, scn, &c)?;

    // Full-phase audit: the endpoint checks rely on monotone v; verify
    // rather than assume.
    let law = st.spec.law;
    let u_s2 = law.command(st.chain.v_s2);
    let u_f = law.command(scn.v_f);
    let (mut u_min_cmd, mut u_max_cmd) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=cfg.audit_points {
        let t = st.spec.t_start
            + st.dt_q3 * R::of(k as f64) / R::of(cfg.audit_points as f64);
        let v = brake_velocity(&st.spec, t)?;
        let u = law.command(v).as_f64();
        u_min_cmd = u_min_cmd.min(u);
        u_max_cmd = u_max_cmd.max(u);
    }
    let bound_violation = (u_max_cmd - 0.0)
        .max(scn.vehicle.u_min.as_f64() - u_min_cmd)
        .max(0.0);
    let endpoint_hi = u_s2.as_f64().max(u_f.as_f64());
    let endpoint_lo = u_s2.as_f64().min(u_f.as_f64());
    let beyond_endpoints = (u_max_cmd - endpoint_hi)
        .max(endpoint_lo - u_min_cmd)
        .max(0.0);

    Ok(DirectSolution {
        theta,
        dt_q3: st.dt_q3,
        law,
        q1: st.chain.q1,
        q2: st.chain.q2,
        brake: st.spec,
        cost,
        g_f,
        ineq,
        saturation: SaturationReport {
            u_min_cmd,
            u_max_cmd,
            bound_violation,
            beyond_endpoints,
        },
        stationarity: sol.stationarity,
    })
}

/// Sample the direct plan at step `dt` (plus the exact final time).
/// All rows come from closed forms; the costate column stays empty.
pub fn extract_trajectory_direct<R: Real>(
    sol: &DirectSolution<R>,
    scn: &Scenario<R>,
    c: &Coefficients<R>,
    dt: R,
) -> Trajectory<R> {
    let (t_s1, t_s2, t_f) = sol.times();
    let mut rows = Vec::new();
    let n = (t_f / dt).as_f64().floor() as usize;
    let mut push = |t: R| {
        let (mode, s, v, u) = if t < t_s1 && !t_s1.is_zero() {
            let v = crate::analytic::coast_velocity(&sol.q1, t).expect("inside phase");
            let s = crate::analytic::coast_distance(&sol.q1, t).expect("inside phase");
            (Mode::Q1DisengagedCoast, s, v, R::zero())
        } else if t < t_s2 {
            let v = crate::analytic::coast_velocity(&sol.q2, t).expect("inside phase");
            let s = crate::analytic::coast_distance(&sol.q2, t).expect("inside phase");
            (Mode::Q2EngagedCoast, s, v, -scn.a_eng())
        } else {
            let tc = t.min(t_f);
            let v = brake_velocity(&sol.brake, tc).expect("inside phase");
            let s = brake_distance(&sol.brake, tc).expect("inside phase");
            (Mode::Q3Brake, s, v, sol.law.command(v))
        };
        let a = -c.c_air * v * v - c.a_alpha + u;
        rows.push(TrajectoryRow {
            t,
            mode,
            s,
            v,
            a,
            u,
            lambda_v: None,
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
