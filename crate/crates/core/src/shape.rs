//! The self-similar droplet: the convex set that the anisotropic flow shrinks
//! homothetically, `D(t) = sqrt(1 - 2 alpha t) D`.
//!
//! In the frame `f1 = (1, -1)/sqrt(2)`, `f2 = (1, 1)/sqrt(2)` the arc between
//! `(1, 0)` and `(0, 1)` is the graph of
//!
//! ```text
//! f0(x) = beta * (4 alpha x I(x) - exp(2 alpha x^2)),   I(x) = int_0^x exp(2 alpha t^2) dt,
//! ```
//!
//! for `|x| <= 1/sqrt(2)`, with `beta = -sqrt(2) exp(-alpha)` and `alpha` the
//! positive root of `4 sqrt(2) alpha exp(-alpha) I(1/sqrt(2)) = 1`. The other
//! three arcs are its images under rotations by multiples of `pi/2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use thiserror::Error;

use crate::geometry::{ConvexPolygon, Point, Region};
use crate::quadrature::integrate;

/// Absolute tolerance for the inner Gaussian-type integral.
const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("x = {0} is outside [-1/sqrt(2), 1/sqrt(2)]")]
    Domain(f64),
    #[error("could not bracket the root (last residual {0})")]
    Bracket(f64),
    #[error("tolerance must be positive")]
    Tolerance,
}

/// `int_0^x exp(2 alpha t^2) dt`, odd in `x`.
pub fn gauss_integral(x: f64, alpha: f64) -> f64 {
    let q = integrate(|t| (2.0 * alpha * t * t).exp(), 0.0, x.abs(), INNER_TOL).value;
    q.copysign(x)
}

/// Left-hand side minus one of the equation fixing `alpha`.
pub fn alpha_residual(alpha: f64) -> f64 {
    4.0 * SQRT_2 * alpha * (-alpha).exp() * gauss_integral(FRAC_1_SQRT_2, alpha) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRoot {
    pub alpha: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Positive root of [`alpha_residual`] by bisection. The bracket starts at
/// `1/16` and doubles its upper end until the residual turns positive.
pub fn solve_alpha(tolerance: f64) -> Result<AlphaRoot, ShapeError> {
    if !(tolerance > 0.0) {
        return Err(ShapeError::Tolerance);
    }
    let mut lo = 1.0 / 16.0;
    let r_lo = alpha_residual(lo);
    if r_lo >= 0.0 {
        return Err(ShapeError::Bracket(r_lo));
    }
    let mut hi = 2.0 * lo;
    let mut r_hi = alpha_residual(hi);
    while r_hi <= 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(ShapeError::Bracket(r_hi));
        }
        r_hi = alpha_residual(hi);
    }
    let mut iterations = 0;
    while hi - lo > tolerance.min(1e-3) * 1e-3 && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if alpha_residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (r_lo, r_hi) = (alpha_residual(lo), alpha_residual(hi));
    let (alpha, residual) = if r_lo.abs() <= r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    Ok(AlphaRoot { alpha, residual, iterations })
}

fn beta_of(alpha: f64) -> f64 {
    -SQRT_2 * (-alpha).exp()
}

fn check_domain(x: f64) -> Result<(), ShapeError> {
    if x.abs() > FRAC_1_SQRT_2 * (1.0 + 1e-12) {
        Err(ShapeError::Domain(x))
    } else {
        Ok(())
    }
}

/// The arc profile at `x` for a given `alpha` (with `beta` tied to it).
pub fn f0(x: f64, alpha: f64) -> Result<f64, ShapeError> {
    check_domain(x)?;
    let beta = beta_of(alpha);
    Ok(beta * (4.0 * alpha * x * gauss_integral(x, alpha) - (2.0 * alpha * x * x).exp()))
}

/// First derivative `4 alpha beta I(x)`.
pub fn f0_prime(x: f64, alpha: f64) -> Result<f64, ShapeError> {
    check_domain(x)?;
    Ok(4.0 * alpha * beta_of(alpha) * gauss_integral(x, alpha))
}

/// Second derivative `4 alpha beta exp(2 alpha x^2)`.
pub fn f0_second(x: f64, alpha: f64) -> Result<f64, ShapeError> {
    check_domain(x)?;
    Ok(4.0 * alpha * beta_of(alpha) * (2.0 * alpha * x * x).exp())
}

/// Residuals of the profile ODE `f'' = 4 alpha (-f + x f')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCheck {
    /// Using the closed-form first and second derivatives.
    pub analytic: f64,
    /// Using five-point finite differences of `f0` values only.
    pub finite_difference: f64,
    /// `f0(1/sqrt(2)) - 1/sqrt(2)`.
    pub endpoint_value: f64,
    /// `f0'(-1/sqrt(2)) - 1` and `f0'(1/sqrt(2)) + 1`.
    pub endpoint_slopes: (f64, f64),
}

/// Evaluates the ODE on `n` equally spaced interior points, staying one
/// finite-difference stencil away from the endpoints.
pub fn verify_invariant_ode(alpha: f64, n: usize) -> OdeCheck {
    let step = 1e-3;
    let f = |x: f64| {
        let beta = beta_of(alpha);
        beta * (4.0 * alpha * x * gauss_integral(x, alpha) - (2.0 * alpha * x * x).exp())
    };
    let a = -FRAC_1_SQRT_2 + 2.0 * step;
    let b = FRAC_1_SQRT_2 - 2.0 * step;
    let mut analytic: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for i in 0..n {
        let x = if n == 1 { 0.0 } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let (v, d1, d2) = (f(x), f0_prime(x, alpha).unwrap(), f0_second(x, alpha).unwrap());
        analytic = analytic.max((d2 - 4.0 * alpha * (-v + x * d1)).abs());
        let (fm2, fm1, fp1, fp2) = (f(x - 2.0 * step), f(x - step), f(x + step), f(x + 2.0 * step));
        let fd1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * step);
        let fd2 = (-fm2 + 16.0 * fm1 - 30.0 * v + 16.0 * fp1 - fp2) / (12.0 * step * step);
        fd = fd.max((fd2 - 4.0 * alpha * (-v + x * fd1)).abs());
    }
    OdeCheck {
        analytic,
        finite_difference: fd,
        endpoint_value: f(FRAC_1_SQRT_2) - FRAC_1_SQRT_2,
        endpoint_slopes: (
            f0_prime(-FRAC_1_SQRT_2, alpha).unwrap() - 1.0,
            f0_prime(FRAC_1_SQRT_2, alpha).unwrap() + 1.0,
        ),
    }
}

/// The self-similar droplet for a given `alpha`.
#[derive(Debug, Clone)]
pub struct InvariantShape {
    pub alpha: f64,
    pub beta: f64,
    /// Closed counter-clockwise boundary polyline, starting at `(1, 0)`
    /// (the first point is not repeated).
    pub boundary: Vec<Point>,
}

/// Rotates by `quarter * pi/2`.
fn rotate_quarter(p: Point, quarter: usize) -> Point {
    match quarter % 4 {
        0 => p,
        1 => [-p[1], p[0]],
        2 => [-p[0], -p[1]],
        _ => [p[1], -p[0]],
    }
}

/// Builds the droplet boundary with `n_samples` points per quarter arc,
/// uniform in the graph coordinate.
pub fn build_shape(alpha: f64, n_samples: usize) -> InvariantShape {
    let n = n_samples.max(2);
    let shape = InvariantShape { alpha, beta: beta_of(alpha), boundary: Vec::new() };
    let quarter: Vec<Point> = (0..n)
        .map(|i| {
            let x = FRAC_1_SQRT_2 - SQRT_2 * i as f64 / n as f64;
            shape.arc_point(x)
        })
        .collect();
    let boundary = (0..4).flat_map(|q| quarter.iter().map(move |&p| rotate_quarter(p, q))).collect();
    InvariantShape { boundary, ..shape }
}

impl InvariantShape {
    /// Solves for `alpha` to near machine precision and builds the default
    /// boundary (4096 points per quarter).
    pub fn standard() -> Self {
        let root = solve_alpha(1e-14).expect("the root is bracketed for this equation");
        build_shape(root.alpha, 4096)
    }

    pub fn f0(&self, x: f64) -> f64 {
        self.beta * (4.0 * self.alpha * x * gauss_integral(x, self.alpha) - (2.0 * self.alpha * x * x).exp())
    }

    fn f0_prime(&self, x: f64) -> f64 {
        4.0 * self.alpha * self.beta * gauss_integral(x, self.alpha)
    }

    fn f0_second(&self, x: f64) -> f64 {
        4.0 * self.alpha * self.beta * (2.0 * self.alpha * x * x).exp()
    }

    /// Point `x f1 + f0(x) f2` of the first-quadrant arc.
    pub fn arc_point(&self, x: f64) -> Point {
        let v = self.f0(x);
        [(x + v) * FRAC_1_SQRT_2, (v - x) * FRAC_1_SQRT_2]
    }

    /// Graph coordinate of the arc point whose outward normal has angle
    /// `theta` in `[0, pi/2]`: the solution of `f0'(x) = tan(theta - pi/4)`.
    fn arc_coordinate(&self, theta: f64) -> f64 {
        let target = (theta - FRAC_PI_4).tan();
        // f0' decreases from 1 at -1/sqrt(2) to -1 at 1/sqrt(2).
        let (mut lo, mut hi) = (-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.f0_prime(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn reduce(theta: f64) -> (f64, usize) {
        let t = theta.rem_euclid(2.0 * PI);
        let q = ((t / FRAC_PI_2).floor() as usize).min(3);
        (t - q as f64 * FRAC_PI_2, q)
    }

    /// Boundary point with outward normal `(cos theta, sin theta)`.
    pub fn point_at_normal(&self, theta: f64) -> Point {
        let (t, q) = Self::reduce(theta);
        rotate_quarter(self.arc_point(self.arc_coordinate(t)), q)
    }

    /// Support function `h(theta) = max_{p in D} p . (cos theta, sin theta)`.
    pub fn support(&self, theta: f64) -> f64 {
        let p = self.point_at_normal(theta);
        p[0] * theta.cos() + p[1] * theta.sin()
    }

    /// Support function on the uniform grid `2 pi j / n`.
    pub fn support_table(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.support(2.0 * PI * j as f64 / n as f64)).collect()
    }

    /// Curvature of the boundary at the point with normal angle `theta`.
    pub fn curvature(&self, theta: f64) -> f64 {
        let (t, _) = Self::reduce(theta);
        let x = self.arc_coordinate(t);
        let d1 = self.f0_prime(x);
        self.f0_second(x).abs() / (1.0 + d1 * d1).powf(1.5)
    }

    /// Exact area `1/alpha`.
    pub fn area(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Area enclosed by the sampled boundary polyline.
    pub fn polyline_area(&self) -> f64 {
        crate::geometry::polygon_area(&self.boundary)
    }

    /// Largest centred disk inside the droplet: the minimum of the support
    /// function, attained on the axes.
    pub fn inradius(&self) -> f64 {
        self.support(0.0).min(self.support(FRAC_PI_4))
    }

    /// Time at which the flow shrinks the droplet to a point, `Area / 2`.
    pub fn extinction_time(&self) -> f64 {
        0.5 * self.area()
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::from_ccw(self.boundary.clone())
    }
}

impl Region for InvariantShape {
    /// Exact membership using the four-fold symmetry and the arc graph.
    fn contains(&self, p: Point) -> bool {
        let (x, y) = (p[0].abs(), p[1].abs());
        let u = (x - y) * FRAC_1_SQRT_2;
        let v = (x + y) * FRAC_1_SQRT_2;
        u.abs() <= FRAC_1_SQRT_2 && v <= self.f0(u)
    }

    fn bounds(&self) -> (Point, Point) {
        ([-1.0, -1.0], [1.0, 1.0])
    }
}
