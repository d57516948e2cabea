//! Anisotropic curve-shortening flow of convex curves,
//! `d/dt h(theta, t) = -a(theta) k(theta, t)`, in support-function form.
//!
//! A convex curve is stored through its support function on a uniform angle
//! grid; the curvature is recomputed from `1/k = h'' + h` at every step with
//! the periodic three-point stencil.

mod anisotropy;
mod run;
mod support;

pub use anisotropy::{anisotropy, anisotropy_exact, AnisotropyTable, Offset};
pub use run::{
    curvature_run, flow_diagnostics, flow_limit, flow_run, DiagnosticsReport, DiagnosticsRow, FlowLimit,
    FlowOptions, FlowRun, FlowState, LimitOptions, StopReason,
};
pub use support::{region_dilate_erode, ConvexCurve, SupportFunction};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("non-convex support function: h'' + h = {value} at theta = {theta}")]
    NonConvex { theta: f64, value: f64 },
    #[error("curvature blew up at t = {time} (k_max = {k_max}), before the guard time {guard}")]
    BlowUp { time: f64, k_max: f64, guard: f64 },
    #[error("grid sizes differ: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("w-sequence must be strictly decreasing and positive")]
    BadSequence,
    #[error("solutions are not monotone in w: h(w'={w_small}) exceeds h(w={w_large}) by {excess}")]
    NonMonotone { w_small: f64, w_large: f64, excess: f64 },
    #[error("mobility must be positive (minimum {0})")]
    NonPositiveMobility(f64),
    #[error("grid needs at least 8 angles, divisible by 4")]
    BadGrid,
}
