//! Energy-efficient multi-phase braking planner.
//!
//! Plans a deceleration from an initial speed to a lower target speed at a
//! given distance as three phases: a disengaged coast (q1), an engaged coast
//! under engine drag (q2), and an active braking arc (q3). Two solvers are
//! provided: an indirect method that shoots on the optimality system of the
//! switched problem, and a direct method that optimizes a small parameter
//! vector with closed-form phase dynamics.
//!
//! All core code is generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the aliases below fix `f64` for everyday use.

pub mod analytic;
pub mod cli;
pub mod direct;
pub mod error;
pub mod indirect;
pub mod model;
pub mod numerics;
pub mod real;
pub mod report;
pub mod scenario;
pub mod scenario_file;
pub mod trajectory;
pub mod verify;

pub use error::{AnalyticError, ModelError, NumericsError, SolveError};
pub use model::Mode;
pub use real::Real;

/// Scenario at the default `f64` precision.
pub type Scenario = scenario::Scenario<f64>;
/// Derived resistance coefficients at `f64`.
pub type Coefficients = model::Coefficients<f64>;
/// Indirect (shooting) solution at `f64`.
pub type IndirectSolution = indirect::IndirectSolution<f64>;
/// Direct (parametric) solution at `f64`.
pub type DirectSolution = direct::DirectSolution<f64>;
/// Sampled plan at `f64`.
pub type Trajectory = trajectory::Trajectory<f64>;
