//! Reference solvers for the one-dimensional limit equations of the
//! interface processes: the discrete and continuous heat problems with
//! Dirichlet data, and the nonlinear lattice system
//! `d/dt Phi(x) = 1/2 [sigma(q_x) - sigma(q_{x-1})]`, `q_x = Phi(x+1) - Phi(x)`,
//! `sigma(u) = u / (1 + |u|)`.

mod grid;
mod heat;
mod nonlinear;
mod ode;

pub use grid::{sigma, sigma_prime, GradientField, Grid1D};
pub use heat::{
    heat_solve_continuous, heat_solve_discrete, inverse_sine_transform, sine_transform, ContinuousSolution,
};
pub use nonlinear::{
    gradient_monitors, laplacian_bounds, nonlinear_solve, nonlinear_trajectory, GradientReport, GradientRow,
    LaplacianBounds,
};
pub use ode::{dormand_prince, OdeStats};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PdeError {
    #[error("initial data {value} does not match the boundary value {boundary} at x = {x}")]
    IncompatibleBoundary { x: f64, value: f64, boundary: f64 },
    #[error("grid needs at least two sites")]
    TooSmall,
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}
