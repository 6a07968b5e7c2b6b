//! Self-contained numerical kernels: fixed-step RK4, damped Newton with
//! finite-difference Jacobians, Gauss-Legendre quadrature, and a small
//! augmented-Lagrangian NLP solver.

pub mod linalg;
pub mod newton;
pub mod nlp;
pub mod quadrature;
pub mod rk4;

pub use newton::{newton_solve, NewtonConfig};
pub use nlp::{nlp_solve, NlpConfig, NlpSolution};
pub use quadrature::{gauss_legendre, gauss_legendre_integrate};
pub use rk4::{integrate, integrate_dense, IntegratorConfig};
