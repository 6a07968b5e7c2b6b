//! Property-based checks: closed forms against a blind RK4 oracle on random
//! phase specs, and structural invariants of sampled trajectories.

use std::sync::OnceLock;

use proptest::prelude::*;

use ecobrake::analytic::{
    brake_distance, brake_duration, brake_velocity, coast_distance, coast_velocity, BrakeLaw,
    BrakePhaseSpec, CoastPhaseSpec,
};
use ecobrake::indirect::{extract_trajectory, solve_indirect, IndirectConfig, IndirectSolution};
use ecobrake::model::Coefficients;
use ecobrake::numerics::{integrate, IntegratorConfig};
use ecobrake::scenario::Scenario;
use ecobrake::Mode;

fn coeffs() -> Coefficients<f64> {
    Scenario::<f64>::case_study().coefficients().unwrap()
}

fn rk4(f: impl Fn(f64, &[f64]) -> Vec<f64>, x0: &[f64], t0: f64, t1: f64) -> Vec<f64> {
    integrate(f, x0, t0, t1, &IntegratorConfig { steps: 10_000 }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coast_closed_form_tracks_rk4(
        v0 in 5.0..60.0f64,
        a_eng in 0.05..0.9f64,
        frac in 0.05..0.9f64,
        engaged: bool,
    ) {
        let c = coeffs();
        let mode = if engaged { Mode::Q2EngagedCoast } else { Mode::Q1DisengagedCoast };
        let spec = CoastPhaseSpec::new(mode, 0.0, 0.0, v0, &c, a_eng);
        let dt = frac * ((v0 / spec.b1).atan() - 1e-6) / -spec.b2;
        let (a_eff, c_air) = (spec.a_eff, spec.c_air);
        let x = rk4(
            |_t, x| vec![x[1], -c_air * x[1] * x[1] - a_eff],
            &[0.0, v0],
            0.0,
            dt,
        );
        prop_assert!((coast_velocity(&spec, dt).unwrap() - x[1]).abs() < 1e-6);
        prop_assert!((coast_distance(&spec, dt).unwrap() - x[0]).abs() < 1e-5);
    }

    #[test]
    fn brake_closed_form_tracks_rk4(
        v0 in 8.0..55.0f64,
        u_m in -0.5..-0.02f64,
        u_n in -8.0..-0.5f64,
        frac in 0.35..0.95f64,
    ) {
        let c = coeffs();
        let law = BrakeLaw { u_m, u_n };
        let spec = BrakePhaseSpec::new(law, 0.0, 0.0, v0, &c);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        // Keep the whole arc on the decelerating branch of the quadratic.
        prop_assume!(c.c_air * v0 * v0 + u_m * v0 + c.a_alpha - u_n > 0.01);
        let dur = brake_duration(&spec, v0 * frac);
        prop_assume!(dur.is_ok());
        let dt = dur.unwrap();
        prop_assume!((1e-3..500.0).contains(&dt));
        let x = rk4(
            |_t, x| {
                let v = x[1];
                vec![v, -c.c_air * v * v - c.a_alpha + law.command(v)]
            },
            &[0.0, v0],
            0.0,
            dt,
        );
        prop_assert!((brake_velocity(&spec, dt).unwrap() - x[1]).abs() < 1e-6);
        prop_assert!((brake_distance(&spec, dt).unwrap() - x[0]).abs() < 1e-5);
    }
}

fn case_study_solution() -> &'static (Scenario<f64>, Coefficients<f64>, IndirectSolution<f64>) {
    static SOL: OnceLock<(Scenario<f64>, Coefficients<f64>, IndirectSolution<f64>)> =
        OnceLock::new();
    SOL.get_or_init(|| {
        let scn = Scenario::<f64>::case_study();
        let c = scn.coefficients().unwrap();
        let sol = solve_indirect(&scn, &IndirectConfig::default(), None).unwrap();
        (scn, c, sol)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampled_trajectory_invariants(dt in 0.005..0.5f64) {
        let (scn, c, sol) = case_study_solution();
        let traj = extract_trajectory(sol, scn, c, dt);
        let rows = &traj.rows;
        prop_assert!(!rows.is_empty());
        let mut mode_changes = 0;
        for w in rows.windows(2) {
            prop_assert!(w[1].t > w[0].t, "t not strictly increasing");
            prop_assert!(w[1].s >= w[0].s, "s decreased");
            if w[1].mode != w[0].mode {
                mode_changes += 1;
            }
        }
        prop_assert!(mode_changes <= 2);
        prop_assert!(rows.iter().all(|r| r.v > 0.0));
    }
}
