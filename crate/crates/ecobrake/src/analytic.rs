//! Closed-form state evolution for the coasting phases, closed-form coasting
//! costates, and closed-form braking-phase solutions under the affine
//! state-feedback law u = -u_m v + u_n.

use crate::error::AnalyticError;
use crate::model::{Coefficients, Mode};
use crate::real::Real;

/// Guard distance from the tan branch limits.
const BRANCH_EPS: f64 = 1e-9;

/// One coasting phase (Q1 or Q2), fully determined by its start state and
/// the effective resistance deceleration a_eff = a_alpha (+ a_eng for Q2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoastPhaseSpec<R> {
    pub mode: Mode,
    pub t_start: R,
    pub s_start: R,
    pub v_start: R,
    /// a_alpha for Q1, a_alpha + a_eng for Q2.
    pub a_eff: R,
    /// b1 = sqrt(a_eff / c_air) [m/s].
    pub b1: R,
    /// b2 = -sqrt(a_eff * c_air) [1/s].
    pub b2: R,
    pub c_air: R,
}

impl<R: Real> CoastPhaseSpec<R> {
    /// `mode` must be Q1 or Q2; a_eng only contributes for Q2.
    pub fn new(
        mode: Mode,
        t_start: R,
        s_start: R,
        v_start: R,
        c: &Coefficients<R>,
        a_eng: R,
    ) -> Self {
        assert!(mode != Mode::Q3Brake, "coast spec for a braking phase");
        let a_eff = match mode {
            Mode::Q1DisengagedCoast => c.a_alpha,
            _ => c.a_alpha + a_eng,
        };
        Self {
            mode,
            t_start,
            s_start,
            v_start,
            a_eff,
            b1: (a_eff / c.c_air).sqrt(),
            b2: -(a_eff * c.c_air).sqrt(),
            c_air: c.c_air,
        }
    }

    /// D(v) = c_air v^2 + a_eff, the magnitude of dv/dt at velocity v.
    fn resistance(&self, v: R) -> R {
        self.c_air * v * v + self.a_eff
    }

    fn tan_arg(&self, t: R) -> Result<R, AnalyticError> {
        let arg = self.b2 * (t - self.t_start) + (self.v_start / self.b1).atan();
        let eps = R::of(BRANCH_EPS);
        if arg <= eps || arg >= R::of(std::f64::consts::FRAC_PI_2) - eps {
            return Err(AnalyticError::VelocityUnderflow { t: t.as_f64() });
        }
        Ok(arg)
    }
}

/// v(t) = b1 tan(b2 (t - t0) + arctan(v0 / b1)).
pub fn coast_velocity<R: Real>(spec: &CoastPhaseSpec<R>, t: R) -> Result<R, AnalyticError> {
    Ok(spec.b1 * spec.tan_arg(t)?.tan())
}

/// s(t) = s0 + ln(((v0/b1)^2 + 1) / ((v(t)/b1)^2 + 1)) / (2 c_air).
pub fn coast_distance<R: Real>(spec: &CoastPhaseSpec<R>, t: R) -> Result<R, AnalyticError> {
    let v = coast_velocity(spec, t)?;
    let r0 = spec.v_start / spec.b1;
    let rt = v / spec.b1;
    Ok(spec.s_start
        + ((r0 * r0 + R::one()) / (rt * rt + R::one())).ln() / (R::two() * spec.c_air))
}

/// Costate lambda_v along a coasting phase, anchored at the phase's terminal
/// condition (t_s1 with value 0 for Q1, t_s2 with value 2 w_u a_eng for Q2):
///
/// lambda_v(t) = lambda_s (v(t) - v(t_a)) / D(v(t)) + lambda_a D(v(t_a)) / D(v(t)).
pub fn coast_costate<R: Real>(
    spec: &CoastPhaseSpec<R>,
    lambda_s: R,
    lambda_anchor: R,
    t_anchor: R,
    t: R,
) -> Result<R, AnalyticError> {
    let v_t = coast_velocity(spec, t)?;
    let v_a = coast_velocity(spec, t_anchor)?;
    let d_t = spec.resistance(v_t);
    let d_a = spec.resistance(v_a);
    Ok(lambda_s * (v_t - v_a) / d_t + lambda_anchor * d_a / d_t)
}

/// The affine braking feedback law u = -u_m v + u_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrakeLaw<R> {
    /// Velocity gain [1/s].
    pub u_m: R,
    /// Offset [m/s^2].
    pub u_n: R,
}

impl<R: Real> BrakeLaw<R> {
    pub fn command(&self, v: R) -> R {
        -self.u_m * v + self.u_n
    }
}

/// Braking phase under a `BrakeLaw`, with its closed-form constants
/// b1 = sqrt(u_m^2 - 4 c_air (a_alpha - u_n)) and
/// b2 = (2 c_air v0 + u_m - b1) / (2 c_air v0 + u_m + b1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrakePhaseSpec<R> {
    pub law: BrakeLaw<R>,
    pub t_start: R,
    pub s_start: R,
    pub v_start: R,
    pub b1: R,
    pub b2: R,
    pub c_air: R,
    pub a_alpha: R,
}

impl<R: Real> BrakePhaseSpec<R> {
    pub fn new(
        law: BrakeLaw<R>,
        t_start: R,
        s_start: R,
        v_start: R,
        c: &Coefficients<R>,
    ) -> Result<Self, AnalyticError> {
        let disc = law.u_m * law.u_m - R::of(4.0) * c.c_air * (c.a_alpha - law.u_n);
        if disc <= R::zero() {
            return Err(AnalyticError::NegativeBrakeDiscriminant {
                disc: disc.as_f64(),
            });
        }
        let b1 = disc.sqrt();
        let den = R::two() * c.c_air * v_start + law.u_m + b1;
        if den.abs() < R::of(1e-300) {
            return Err(AnalyticError::Domain {
                what: "2 c_air v_start + u_m + b1 vanishes".to_string(),
            });
        }
        let b2 = (R::two() * c.c_air * v_start + law.u_m - b1) / den;
        Ok(Self {
            law,
            t_start,
            s_start,
            v_start,
            b1,
            b2,
            c_air: c.c_air,
            a_alpha: c.a_alpha,
        })
    }

    fn decay(&self, t: R) -> R {
        (-self.b1 * (t - self.t_start)).exp()
    }
}

/// v(t) of the braking phase (two-term exponential form).
pub fn brake_velocity<R: Real>(spec: &BrakePhaseSpec<R>, t: R) -> Result<R, AnalyticError> {
    let e = spec.decay(t);
    let den = R::one() - spec.b2 * e;
    if den.abs() < R::of(1e-14) {
        return Err(AnalyticError::DegenerateDenominator { t: t.as_f64() });
    }
    let u_m = spec.law.u_m;
    Ok(((u_m + spec.b1) * spec.b2 * e - (u_m - spec.b1)) / (R::two() * spec.c_air * den))
}

/// s(t) of the braking phase (log-exponential form).
pub fn brake_distance<R: Real>(spec: &BrakePhaseSpec<R>, t: R) -> Result<R, AnalyticError> {
    let e = spec.decay(t);
    let ratio = (R::one() - spec.b2 * e) / (R::one() - spec.b2);
    if ratio <= R::zero() {
        return Err(AnalyticError::DegenerateDenominator { t: t.as_f64() });
    }
    Ok(spec.s_start
        + (spec.b1 - spec.law.u_m) / (R::two() * spec.c_air) * (t - spec.t_start)
        + ratio.ln() / spec.c_air)
}

/// Space-domain form s(v): distance at which the braking phase reaches
/// velocity `v`.
pub fn brake_distance_of_velocity<R: Real>(
    spec: &BrakePhaseSpec<R>,
    v: R,
) -> Result<R, AnalyticError> {
    let c = spec.c_air;
    let u_m = spec.law.u_m;
    let u_n = spec.law.u_n;
    let v0 = spec.v_start;
    let quad = |w: R| c * w * w + u_m * w + spec.a_alpha - u_n;
    let q0 = quad(v0);
    let qv = quad(v);
    if q0 <= R::zero() || qv <= R::zero() {
        return Err(AnalyticError::Domain {
            what: format!("braking quadratic non-positive at v = {}", v),
        });
    }
    let lin = |w: R| R::two() * c * w + u_m;
    let r1 = (lin(v) - spec.b1) / (lin(v) + spec.b1);
    let r2 = (lin(v0) + spec.b1) / (lin(v0) - spec.b1);
    if r1 <= R::zero() || r2 <= R::zero() {
        return Err(AnalyticError::Domain {
            what: format!("log ratio non-positive at v = {}", v),
        });
    }
    Ok(spec.s_start
        + (q0 / qv).ln() / (R::two() * c)
        + u_m / (R::two() * c * spec.b1) * (r1.ln() + r2.ln()))
}

/// Elapsed time for the braking phase to reach `v_end`.
pub fn brake_duration<R: Real>(spec: &BrakePhaseSpec<R>, v_end: R) -> Result<R, AnalyticError> {
    let c = spec.c_air;
    let u_m = spec.law.u_m;
    let lin = |w: R| R::two() * c * w + u_m;
    let r1 = (lin(v_end) - spec.b1) / (lin(v_end) + spec.b1);
    let r2 = (lin(spec.v_start) + spec.b1) / (lin(spec.v_start) - spec.b1);
    if r1 <= R::zero() || r2 <= R::zero() {
        return Err(AnalyticError::Domain {
            what: format!("duration log ratio non-positive at v_end = {}", v_end),
        });
    }
    Ok(-(r1.ln() + r2.ln()) / spec.b1)
}

/// Both coasting phases stitched: Q1 from (t = 0, s = 0, v0), Q2 starting at
/// Q1's endpoint at t_s1, evaluated through t_s2.
#[derive(Debug, Clone, Copy)]
pub struct CoastChain<R> {
    pub q1: CoastPhaseSpec<R>,
    pub q2: CoastPhaseSpec<R>,
    pub t_s1: R,
    pub t_s2: R,
    pub v_s1: R,
    pub s_s2: R,
    pub v_s2: R,
}

pub fn coast_chain<R: Real>(
    v0: R,
    t_s1: R,
    t_s2: R,
    c: &Coefficients<R>,
    a_eng: R,
) -> Result<CoastChain<R>, AnalyticError> {
    let q1 = CoastPhaseSpec::new(Mode::Q1DisengagedCoast, R::zero(), R::zero(), v0, c, a_eng);
    let v_s1 = coast_velocity(&q1, t_s1)?;
    let s_s1 = coast_distance(&q1, t_s1)?;
    let q2 = CoastPhaseSpec::new(Mode::Q2EngagedCoast, t_s1, s_s1, v_s1, c, a_eng);
    let v_s2 = coast_velocity(&q2, t_s2)?;
    let s_s2 = coast_distance(&q2, t_s2)?;
    Ok(CoastChain {
        q1,
        q2,
        t_s1,
        t_s2,
        v_s1,
        s_s2,
        v_s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_coefficients, Environment, VehicleParams};
    use crate::numerics::{integrate, IntegratorConfig};

    fn case_coeffs() -> Coefficients<f64> {
        let vp = VehicleParams {
            mass: 2795.0,
            frontal_area: 2.26,
            drag_coeff: 0.25,
            rolling_coeff: 0.015,
            engine_drag_decel: 0.4,
            u_min: -2.0,
        };
        let env = Environment::with_slope_degrees(2.0, 9.81, 1.29);
        derive_coefficients(&vp, &env).unwrap()
    }

    fn rk4_coast(spec: &CoastPhaseSpec<f64>, dt: f64) -> (f64, f64) {
        let cfg = IntegratorConfig { steps: 10_000 };
        let a_eff = spec.a_eff;
        let c_air = spec.c_air;
        let x = integrate(
            |_t, x: &[f64]| vec![x[1], -c_air * x[1] * x[1] - a_eff],
            &[spec.s_start, spec.v_start],
            spec.t_start,
            spec.t_start + dt,
            &cfg,
        )
        .unwrap();
        (x[0], x[1])
    }

    #[test]
    fn coast_identity_at_start() {
        let c = case_coeffs();
        let spec = CoastPhaseSpec::new(Mode::Q1DisengagedCoast, 0.0, 0.0, 41.667, &c, 0.4);
        assert!((coast_velocity(&spec, 0.0).unwrap() - 41.667).abs() < 1e-12);
        assert!(coast_distance(&spec, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn coast_matches_rk4_oracle_q1() {
        let c = case_coeffs();
        let spec = CoastPhaseSpec::new(Mode::Q1DisengagedCoast, 0.0, 0.0, 41.667, &c, 0.4);
        let (s_ref, v_ref) = rk4_coast(&spec, 7.98);
        let v = coast_velocity(&spec, 7.98).unwrap();
        let s = coast_distance(&spec, 7.98).unwrap();
        assert!((v - v_ref).abs() < 1e-6, "v = {}, ref = {}", v, v_ref);
        assert!((s - s_ref).abs() < 1e-5, "s = {}, ref = {}", s, s_ref);
        // Sanity band: roughly the mean-speed distance over 7.98 s.
        assert!((v - 36.2).abs() < 0.1);
        assert!((s - 311.0).abs() < 2.0);
    }

    #[test]
    fn coast_q2_stitches_from_q1_endpoint() {
        let c = case_coeffs();
        let chain = coast_chain(41.667, 7.98, 7.98 + 2.86, &c, 0.4).unwrap();
        // C0 stitching is exact by construction.
        assert_eq!(chain.q2.v_start, coast_velocity(&chain.q1, 7.98).unwrap());
        assert_eq!(chain.q2.s_start, coast_distance(&chain.q1, 7.98).unwrap());
        let (s_ref, v_ref) = rk4_coast(&chain.q2, 2.86);
        assert!((chain.v_s2 - v_ref).abs() < 1e-6);
        assert!((chain.s_s2 - s_ref).abs() < 1e-5);
    }

    #[test]
    fn coast_monotone_in_distance() {
        let c = case_coeffs();
        let spec = CoastPhaseSpec::new(Mode::Q1DisengagedCoast, 0.0, 0.0, 30.0, &c, 0.4);
        let mut prev = 0.0;
        for k in 1..50 {
            let s = coast_distance(&spec, 0.2 * k as f64).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn coast_underflow_is_typed() {
        let c = case_coeffs();
        let spec = CoastPhaseSpec::new(Mode::Q1DisengagedCoast, 0.0, 0.0, 5.0, &c, 0.4);
        // 5 m/s at ~0.5 m/s^2 stops in ~10 s.
        assert!(matches!(
            coast_velocity(&spec, 60.0),
            Err(AnalyticError::VelocityUnderflow { .. })
        ));
    }

    #[test]
    fn costate_anchor_identity_and_zero_solution() {
        let c = case_coeffs();
        let spec = CoastPhaseSpec::new(Mode::Q2EngagedCoast, 0.0, 0.0, 36.0, &c, 0.4);
        let anchor = 2.5;
        let lam = coast_costate(&spec, -0.027, 0.08, anchor, anchor).unwrap();
        assert!((lam - 0.08).abs() < 1e-15);
        // Homogeneous zero solution.
        for k in 0..10 {
            let lam0 = coast_costate(&spec, 0.0, 0.0, anchor, 0.25 * k as f64).unwrap();
            assert_eq!(lam0, 0.0);
        }
    }

    #[test]
    fn costate_matches_backward_rk4() {
        // RK4 on dλ/dt = -λ_s + 2 c_air v(t) λ, integrated backward from the
        // anchor, must reproduce the closed form.
        let c = case_coeffs();
        let w_u = 0.1;
        let a_eng = 0.4;
        let spec = CoastPhaseSpec::new(Mode::Q2EngagedCoast, 0.0, 0.0, 36.0, &c, a_eng);
        let lambda_s = -0.027;
        let anchor_t = 2.86;
        let anchor_val = 2.0 * w_u * a_eng;
        let cfg = IntegratorConfig { steps: 20_000 };
        let lam_back = integrate(
            |t, x: &[f64]| {
                let v = coast_velocity(&spec, t).unwrap();
                vec![-lambda_s + 2.0 * c.c_air * v * x[0]]
            },
            &[anchor_val],
            anchor_t,
            0.0,
            &cfg,
        )
        .unwrap()[0];
        let lam_closed = coast_costate(&spec, lambda_s, anchor_val, anchor_t, 0.0).unwrap();
        assert!(
            (lam_back - lam_closed).abs() < 1e-8,
            "rk4 {} vs closed {}",
            lam_back,
            lam_closed
        );
    }

    fn case_study_brake(c: &Coefficients<f64>) -> BrakePhaseSpec<f64> {
        // Known optimum: braking entered at ~33.2 m/s after both coasts.
        let chain = coast_chain(41.667, 7.93, 7.93 + 2.87, c, 0.4).unwrap();
        BrakePhaseSpec::new(
            BrakeLaw {
                u_m: -0.155,
                u_n: -5.99,
            },
            chain.t_s2,
            chain.s_s2,
            chain.v_s2,
            c,
        )
        .unwrap()
    }

    #[test]
    fn brake_identity_at_start() {
        let c = case_coeffs();
        let spec = case_study_brake(&c);
        let v = brake_velocity(&spec, spec.t_start).unwrap();
        assert!((v - spec.v_start).abs() < 1e-10);
        let s = brake_distance(&spec, spec.t_start).unwrap();
        assert!((s - spec.s_start).abs() < 1e-10);
        assert!(brake_duration(&spec, spec.v_start).unwrap().abs() < 1e-12);
        let sv = brake_distance_of_velocity(&spec, spec.v_start).unwrap();
        assert!((sv - spec.s_start).abs() < 1e-10);
    }

    #[test]
    fn brake_matches_rk4_oracle() {
        let c = case_coeffs();
        let spec = case_study_brake(&c);
        let cfg = IntegratorConfig { steps: 10_000 };
        let u_m = spec.law.u_m;
        let u_n = spec.law.u_n;
        let end = integrate(
            |_t, x: &[f64]| {
                vec![
                    x[1],
                    -c.c_air * x[1] * x[1] - c.a_alpha - u_m * x[1] + u_n,
                ]
            },
            &[spec.s_start, spec.v_start],
            spec.t_start,
            spec.t_start + 2.98,
            &cfg,
        )
        .unwrap();
        let v = brake_velocity(&spec, spec.t_start + 2.98).unwrap();
        let s = brake_distance(&spec, spec.t_start + 2.98).unwrap();
        assert!((v - end[1]).abs() < 1e-6);
        assert!((s - end[0]).abs() < 1e-5);
        // Known optimum: reaches ~100 km/h after ~2.98 s.
        assert!((v - 27.78).abs() < 0.15, "v = {}", v);
    }

    #[test]
    fn brake_duration_round_trip() {
        let c = case_coeffs();
        let spec = case_study_brake(&c);
        let v_end = 27.778;
        let dt = brake_duration(&spec, v_end).unwrap();
        assert!((dt - 2.98).abs() < 0.1, "dt = {}", dt);
        let v = brake_velocity(&spec, spec.t_start + dt).unwrap();
        assert!((v - v_end).abs() < 1e-9);
    }

    #[test]
    fn brake_space_and_time_forms_agree() {
        let c = case_coeffs();
        let spec = case_study_brake(&c);
        for k in 1..=10 {
            let t = spec.t_start + 0.29 * k as f64;
            let v = brake_velocity(&spec, t).unwrap();
            let s_time = brake_distance(&spec, t).unwrap();
            let s_space = brake_distance_of_velocity(&spec, v).unwrap();
            assert!(
                (s_time - s_space).abs() < 1e-8,
                "t = {}: {} vs {}",
                t,
                s_time,
                s_space
            );
        }
    }

    #[test]
    fn brake_duration_strictly_increasing_as_v_end_drops() {
        let c = case_coeffs();
        let spec = case_study_brake(&c);
        let mut prev = -f64::INFINITY;
        let mut v = spec.v_start;
        while v > 20.0 {
            let dt = brake_duration(&spec, v).unwrap();
            assert!(dt > prev, "dt = {dt}, prev = {prev}, v = {v}");
            prev = dt;
            v -= 0.5;
        }
    }

    #[test]
    fn negative_discriminant_rejected() {
        let c = case_coeffs();
        let res = BrakePhaseSpec::new(
            BrakeLaw {
                u_m: 0.0,
                u_n: -1.0,
            },
            0.0,
            0.0,
            30.0,
            &c,
        );
        assert!(matches!(
            res,
            Err(AnalyticError::NegativeBrakeDiscriminant { .. })
        ));
    }
}
