//! Physical parameters, derived coefficients, discrete modes, and the
//! right-hand side of the switched longitudinal dynamics.

use crate::error::ModelError;
use crate::real::Real;

/// Vehicle-side physical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams<R> {
    /// Overall vehicle mass [kg].
    pub mass: R,
    /// Cross-sectional frontal area [m^2].
    pub frontal_area: R,
    /// Aerodynamic drag coefficient [-].
    pub drag_coeff: R,
    /// Rolling friction coefficient [-].
    pub rolling_coeff: R,
    /// Engine drag (or recuperation) deceleration a_eng >= 0 [m/s^2].
    pub engine_drag_decel: R,
    /// Minimal allowed braking command u_min < 0 [m/s^2].
    pub u_min: R,
}

impl<R: Real> VehicleParams<R> {
    pub fn validate(&self) -> Result<(), ModelError> {
        let pos = |field: &'static str, v: R| {
            if v > R::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParam {
                    field,
                    reason: format!("must be positive, got {}", v),
                })
            }
        };
        pos("vehicle.mass_kg", self.mass)?;
        pos("vehicle.frontal_area_m2", self.frontal_area)?;
        pos("vehicle.drag_coeff", self.drag_coeff)?;
        if self.rolling_coeff < R::zero() || !self.rolling_coeff.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "vehicle.rolling_coeff",
                reason: format!("must be nonnegative, got {}", self.rolling_coeff),
            });
        }
        if self.engine_drag_decel < R::zero() || !self.engine_drag_decel.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "vehicle.engine_drag_decel_ms2",
                reason: format!("must be nonnegative, got {}", self.engine_drag_decel),
            });
        }
        if self.u_min >= R::zero() || !self.u_min.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "vehicle.u_min_ms2",
                reason: format!("must be negative, got {}", self.u_min),
            });
        }
        Ok(())
    }
}

/// Road and atmosphere constants. The slope angle is stored in radians and
/// held constant over the planning horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment<R> {
    /// Road slope angle alpha [rad].
    pub slope_angle: R,
    /// Gravitational acceleration [m/s^2].
    pub gravity: R,
    /// Air density [kg/m^3].
    pub air_density: R,
}

impl<R: Real> Environment<R> {
    /// Build from a slope given in degrees (the I/O-layer unit).
    pub fn with_slope_degrees(slope_deg: R, gravity: R, air_density: R) -> Self {
        Self {
            slope_angle: slope_deg.to_radians(),
            gravity,
            air_density,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.gravity <= R::zero() || !self.gravity.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "environment.gravity_ms2",
                reason: format!("must be positive, got {}", self.gravity),
            });
        }
        if self.air_density <= R::zero() || !self.air_density.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "environment.air_density_kgm3",
                reason: format!("must be positive, got {}", self.air_density),
            });
        }
        if !self.slope_angle.is_finite() {
            return Err(ModelError::InvalidParam {
                field: "environment.slope_deg",
                reason: "must be finite".to_string(),
            });
        }
        Ok(())
    }
}

/// Derived resistance coefficients feeding every equation:
/// c_air = rho c_d A_f / (2 m) and a_alpha = c_r g cos(alpha) + g sin(alpha).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<R> {
    /// Air resistance coefficient [1/m].
    pub c_air: R,
    /// Rolling plus grade resistance deceleration [m/s^2].
    pub a_alpha: R,
}

/// Discrete mode of the switched system. A plan always visits the modes in
/// the order Q1 -> Q2 -> Q3; phases may have zero duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Disengaged coasting: powertrain decoupled, u = 0.
    Q1DisengagedCoast,
    /// Engaged coasting: powertrain coupled, u = -a_eng.
    Q2EngagedCoast,
    /// Active braking: continuous command u <= 0.
    Q3Brake,
}

impl Mode {
    /// Short label used in trajectory exports.
    pub fn label(self) -> &'static str {
        match self {
            Mode::Q1DisengagedCoast => "q1",
            Mode::Q2EngagedCoast => "q2",
            Mode::Q3Brake => "q3",
        }
    }
}

/// Continuous state [traveled distance s, velocity v].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<R> {
    pub s: R,
    pub v: R,
}

/// Derive c_air and a_alpha from the physical constants.
///
/// Rejects a_alpha <= 0: the coasting closed forms use sqrt(a_alpha / c_air)
/// and are real only on the uphill/flat-with-rolling regime.
pub fn derive_coefficients<R: Real>(
    vp: &VehicleParams<R>,
    env: &Environment<R>,
) -> Result<Coefficients<R>, ModelError> {
    vp.validate()?;
    env.validate()?;
    let c_air = env.air_density * vp.drag_coeff * vp.frontal_area / (R::two() * vp.mass);
    let a_alpha = vp.rolling_coeff * env.gravity * env.slope_angle.cos()
        + env.gravity * env.slope_angle.sin();
    if a_alpha <= R::zero() {
        return Err(ModelError::NonPositiveResistance {
            a_alpha: a_alpha.as_f64(),
        });
    }
    Ok(Coefficients { c_air, a_alpha })
}

/// Control input u(t, q): 0 while disengaged, -a_eng while engaged, the
/// braking command in Q3.
pub fn mode_control<R: Real>(
    mode: Mode,
    a_eng: R,
    braking_command: Option<R>,
) -> Result<R, ModelError> {
    match (mode, braking_command) {
        (Mode::Q1DisengagedCoast, None) => Ok(R::zero()),
        (Mode::Q2EngagedCoast, None) => Ok(-a_eng),
        (Mode::Q3Brake, Some(u)) => Ok(u),
        (Mode::Q3Brake, None) => Err(ModelError::MissingCommand),
        (_, Some(_)) => Err(ModelError::UnexpectedCommand),
    }
}

/// Right-hand side of the simplified longitudinal dynamics:
/// ds/dt = v, dv/dt = -c_air v^2 - a_alpha + u.
pub fn dynamics_rhs<R: Real>(x: State<R>, u: R, c: &Coefficients<R>) -> (R, R) {
    (x.v, -c.c_air * x.v * x.v - c.a_alpha + u)
}
