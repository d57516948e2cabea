use serde::Serialize;

use super::{dormand_prince, heat_solve_discrete, sigma, sigma_prime, Grid1D, OdeStats, PdeError};

/// Right-hand side `1/2 [sigma(q_x) - sigma(q_{x-1})]` on interior sites,
/// zero on the two boundary sites.
fn rhs(y: &[f64], out: &mut [f64]) {
    let n = y.len();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    let mut s_prev = sigma(y[1] - y[0]);
    for x in 1..n - 1 {
        let s = sigma(y[x + 1] - y[x]);
        out[x] = 0.5 * (s - s_prev);
        s_prev = s;
    }
}

/// Solves the nonlinear lattice system up to time `t` with the given local
/// error tolerance (relative and absolute). The boundary values of `phi0`
/// stay fixed.
pub fn nonlinear_solve(phi0: &Grid1D, t: f64, tol: f64) -> Result<(Grid1D, OdeStats), PdeError> {
    if phi0.len() < 2 {
        return Err(PdeError::TooSmall);
    }
    if t < 0.0 {
        return Err(PdeError::NegativeTime(t));
    }
    let (y, stats) = dormand_prince(|_, y, d| rhs(y, d), &phi0.values, 0.0, t, tol, tol)?;
    Ok((Grid1D::new(phi0.first, y), stats))
}

/// Solution recorded at each of the (ascending) `times`.
pub fn nonlinear_trajectory(phi0: &Grid1D, times: &[f64], tol: f64) -> Result<Vec<(f64, Grid1D)>, PdeError> {
    let mut out = Vec::with_capacity(times.len());
    let mut cur = phi0.clone();
    let mut t_cur = 0.0;
    for &t in times {
        if t < t_cur {
            return Err(PdeError::NegativeTime(t - t_cur));
        }
        let (next, _) = nonlinear_solve(&cur, t - t_cur, tol)?;
        cur = next;
        t_cur = t;
        out.push((t, cur.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianBounds {
    /// Heat flow with diffusivity 1/2.
    pub lower: Grid1D,
    /// Heat flow with diffusivity `sigma'(eta) / 2`.
    pub upper: Grid1D,
    /// Largest initial gradient `max |q_x(0)|`.
    pub eta: f64,
    /// Whether the initial data is concave; the bounds are only guaranteed
    /// in that case.
    pub concave: bool,
}

/// Linear comparison solutions for the nonlinear system started from
/// `phi0`: the heat flow at full speed and the heat flow slowed down by the
/// smallest slope of `sigma` on `[-eta, eta]`. Slowing the diffusivity by a
/// factor is the same as running the heat flow for a shorter time.
pub fn laplacian_bounds(phi0: &Grid1D, t: f64) -> Result<LaplacianBounds, PdeError> {
    let eta = phi0.gradient().max_abs();
    let lower = heat_solve_discrete(phi0, t)?;
    let upper = heat_solve_discrete(phi0, sigma_prime(eta) * t)?;
    Ok(LaplacianBounds { lower, upper, eta, concave: phi0.is_concave(1e-12) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientRow {
    pub time: f64,
    /// `max |q_x|`.
    pub max_gradient: f64,
    /// `max |sigma(q_{x+1}) - sigma(q_x)|`.
    pub max_sigma_jump: f64,
    /// `max |q_{x+1} - q_x|`.
    pub max_gradient_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub rows: Vec<GradientRow>,
    /// Largest increase of `max |q|` between consecutive samples.
    pub gradient_increase: f64,
    /// Largest increase of `max |sigma(q_{x+1}) - sigma(q_x)|`.
    pub sigma_jump_increase: f64,
    /// `max_t L * max |q_{x+1} - q_x|`, the empirical constant in the
    /// `C / L` bound on discrete second differences, with `L` the number of
    /// lattice intervals divided by two.
    pub second_difference_constant: f64,
}

impl GradientReport {
    /// Both monotone functionals non-increasing up to `tol`.
    pub fn monotone(&self, tol: f64) -> bool {
        self.gradient_increase <= tol && self.sigma_jump_increase <= tol
    }
}

/// Evaluates the gradient functionals along a trajectory.
pub fn gradient_monitors(trajectory: &[(f64, Grid1D)]) -> GradientReport {
    let mut rows = Vec::with_capacity(trajectory.len());
    let mut constant: f64 = 0.0;
    for (t, g) in trajectory {
        let q = g.gradient().q;
        let max_gradient = q.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_sigma_jump = q.windows(2).map(|w| (sigma(w[1]) - sigma(w[0])).abs()).fold(0.0, f64::max);
        let max_gradient_jump = q.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        let half_len = (g.len() as f64 - 1.0) / 2.0;
        constant = constant.max(half_len * max_gradient_jump);
        rows.push(GradientRow { time: *t, max_gradient, max_sigma_jump, max_gradient_jump });
    }
    let increase = |f: fn(&GradientRow) -> f64| rows.windows(2).map(|w| f(&w[1]) - f(&w[0])).fold(0.0, f64::max);
    GradientReport {
        gradient_increase: increase(|r| r.max_gradient),
        sigma_jump_increase: increase(|r| r.max_sigma_jump),
        second_difference_constant: constant,
        rows,
    }
}
