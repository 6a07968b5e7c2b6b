//! Error types shared across the planner.

use thiserror::Error;

/// Errors from physical parameter validation and the switched model.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    /// Combined rolling and grade deceleration must be positive; the coasting
    /// closed forms are real only for a_alpha > 0.
    #[error("non-positive resistance: a_alpha = {a_alpha} m/s^2 (downhill or zero-resistance scenarios are unsupported)")]
    NonPositiveResistance { a_alpha: f64 },
    #[error("braking mode requires a deceleration command")]
    MissingCommand,
    #[error("coasting modes take no braking command")]
    UnexpectedCommand,
}

/// Errors from the closed-form phase solutions.
#[derive(Debug, Clone, Error)]
pub enum AnalyticError {
    /// The tan branch of the coasting solution left (0, pi/2): the vehicle
    /// would come to rest before the requested time.
    #[error("coasting velocity underflow at t = {t} s (vehicle stops earlier)")]
    VelocityUnderflow { t: f64 },
    #[error("braking closed form denominator vanishes at t = {t} s")]
    DegenerateDenominator { t: f64 },
    #[error("braking law infeasible: u_m^2 - 4 c_air (a_alpha - u_n) = {disc} < 0")]
    NegativeBrakeDiscriminant { disc: f64 },
    #[error("closed-form domain violation: {what}")]
    Domain { what: String },
}

/// Errors from the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("non-finite state encountered during integration at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("Newton did not converge after {iters} iterations (best residual norm {best_norm:e})")]
    NoConvergence {
        iters: usize,
        best: Vec<f64>,
        best_norm: f64,
    },
    #[error("singular Jacobian in linear solve")]
    SingularJacobian,
    #[error("NLP infeasible: constraint violation stagnated at {violation:e}")]
    Infeasible { violation: f64 },
    #[error("function evaluation failed at the initial point")]
    BadInitialPoint,
}

/// Top-level solver error.
#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("converged times violate ordering: t_s1 = {t_s1}, t_s2 = {t_s2}, t_f = {t_f}")]
    InfeasibleOrdering { t_s1: f64, t_s2: f64, t_f: f64 },
    #[error("engaged coasting phase degenerates (v(t_s1) == v(t_s2)): lambda_s is undefined")]
    DegenerateTimes,
    #[error("terminal costate discriminant negative ({disc}): multiplier infeasible")]
    NegativeDiscriminant { disc: f64 },
}
