//! Planning scenario: boundary states, weights, and physical constants.

use crate::error::{ModelError, SolveError};
use crate::model::{derive_coefficients, Coefficients, Environment, VehicleParams};
use crate::real::Real;

/// Decomposition of the objective J = J_u + J_t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTerms<R> {
    /// Braking-effort term (w_u / 2) \int u^2 dt.
    pub j_u: R,
    /// Duration term w_t * t_f.
    pub j_t: R,
    pub j: R,
}

/// A braking planning task from (s = 0, v0) to (distance_to_target, v_f).
/// Distances and times are normalized so the plan starts at s = 0, t = 0.
#[derive(Debug, Clone, Copy)]
pub struct Scenario<R> {
    pub v0: R,
    pub distance_to_target: R,
    pub v_f: R,
    /// Weight on braking-input energy.
    pub w_u: R,
    /// Weight on total duration.
    pub w_t: R,
    pub vehicle: VehicleParams<R>,
    pub env: Environment<R>,
}

impl<R: Real> Scenario<R> {
    pub fn validate(&self) -> Result<(), SolveError> {
        self.vehicle.validate()?;
        self.env.validate()?;
        if !(self.v0 > R::zero() && self.v0.is_finite()) {
            return Err(SolveError::Scenario(format!(
                "boundary.v0 must be positive, got {}",
                self.v0
            )));
        }
        if !(self.v_f > R::zero() && self.v_f < self.v0) {
            return Err(SolveError::Scenario(format!(
                "boundary.vf must satisfy 0 < vf < v0, got vf = {} with v0 = {}",
                self.v_f, self.v0
            )));
        }
        if !(self.distance_to_target > R::zero() && self.distance_to_target.is_finite()) {
            return Err(SolveError::Scenario(format!(
                "boundary.distance_m must be positive, got {}",
                self.distance_to_target
            )));
        }
        if !(self.w_u > R::zero()) {
            return Err(SolveError::Scenario(format!(
                "weights.w_u must be positive, got {}",
                self.w_u
            )));
        }
        if !(self.w_t > R::zero()) {
            return Err(SolveError::Scenario(format!(
                "weights.w_t must be positive, got {}",
                self.w_t
            )));
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<Coefficients<R>, ModelError> {
        derive_coefficients(&self.vehicle, &self.env)
    }

    pub fn a_eng(&self) -> R {
        self.vehicle.engine_drag_decel
    }

    /// The benchmark case study: 150 km/h to 100 km/h in 500 m on a 2 deg
    /// uphill grade.
    pub fn case_study() -> Self {
        let kmh = |x: f64| R::of(x / 3.6);
        Scenario {
            v0: kmh(150.0),
            distance_to_target: R::of(500.0),
            v_f: kmh(100.0),
            w_u: R::of(0.1),
            w_t: R::of(1.0),
            vehicle: VehicleParams {
                mass: R::of(2795.0),
                frontal_area: R::of(2.26),
                drag_coeff: R::of(0.25),
                rolling_coeff: R::of(0.015),
                engine_drag_decel: R::of(0.4),
                u_min: R::of(-2.0),
            },
            env: Environment::with_slope_degrees(R::of(2.0), R::of(9.81), R::of(1.29)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_study_is_valid() {
        let scn = Scenario::<f64>::case_study();
        scn.validate().unwrap();
        let c = scn.coefficients().unwrap();
        assert!((c.c_air - 1.3038e-4).abs() < 1e-8);
    }

    #[test]
    fn inverted_boundary_rejected() {
        let mut scn = Scenario::<f64>::case_study();
        scn.v_f = scn.v0 + 1.0;
        match scn.validate() {
            Err(SolveError::Scenario(msg)) => assert!(msg.contains("boundary.vf")),
            other => panic!("expected scenario error, got {:?}", other),
        }
    }
}
