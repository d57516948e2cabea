use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::quadrature::integrate_pieces;

/// The kinked mobility `1 / (2 (|cos| + |sin|)^2)`.
pub fn anisotropy_exact(theta: f64) -> f64 {
    let s = theta.cos().abs() + theta.sin().abs();
    0.5 / (s * s)
}

/// Constant added after smoothing.
///
/// Smoothing by a Gaussian alone raises the mobility near the kinks and
/// lowers it elsewhere, so the smoothed family is not ordered in `w`. A shift
/// `-c w` with `c` at least the Lipschitz constant of the mobility restores
/// the ordering `w' < w => a_w' >= a_w`, at the price of an `O(w)` bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Offset {
    /// Pure Gaussian smoothing; preserves the integral of the mobility.
    None,
    /// Subtract `c * w`.
    Linear(f64),
}

impl Default for Offset {
    fn default() -> Self {
        Offset::Linear(1.5)
    }
}

impl Offset {
    pub fn value(&self, w: f64) -> f64 {
        match *self {
            Offset::None => 0.0,
            Offset::Linear(c) => -c * w,
        }
    }
}

/// Mobility smoothed by a centred Gaussian of standard deviation `w` (the
/// periodic convolution), plus the offset. `w = 0` gives the exact function.
pub fn anisotropy(theta: f64, w: f64, offset: Offset) -> f64 {
    if w <= 0.0 {
        return anisotropy_exact(theta);
    }
    let reach = 8.5 * w;
    // Kinks of s -> a(theta - s) sit at s = theta - j pi/2.
    let mut breaks = vec![-reach];
    let j_lo = ((theta - reach) / FRAC_PI_2).ceil() as i64;
    let j_hi = ((theta + reach) / FRAC_PI_2).floor() as i64;
    for j in j_lo..=j_hi {
        let s = theta - j as f64 * FRAC_PI_2;
        if s > -reach && s < reach {
            breaks.push(s);
        }
    }
    breaks.push(reach);
    breaks.sort_by(f64::total_cmp);
    let norm = 1.0 / (w * (2.0 * PI).sqrt());
    let q = integrate_pieces(
        |s| anisotropy_exact(theta - s) * norm * (-0.5 * (s / w).powi(2)).exp(),
        &breaks,
        1e-14,
    );
    q.value + offset.value(w)
}

/// Mobility sampled on the uniform grid `theta_j = 2 pi j / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyTable {
    pub w: f64,
    pub offset: Offset,
    values: Vec<f64>,
}

impl AnisotropyTable {
    pub fn new(n: usize, w: f64, offset: Offset) -> Self {
        // The mobility is pi/2-periodic: compute one quarter when possible.
        let values = if n.is_multiple_of(4) {
            let q: Vec<f64> = (0..n / 4).map(|j| anisotropy(TAU * j as f64 / n as f64, w, offset)).collect();
            (0..n).map(|j| q[j % (n / 4)]).collect()
        } else {
            (0..n).map(|j| anisotropy(TAU * j as f64 / n as f64, w, offset)).collect()
        };
        AnisotropyTable { w, offset, values }
    }

    /// The exact kinked mobility.
    pub fn exact(n: usize) -> Self {
        Self::new(n, 0.0, Offset::None)
    }

    /// A constant mobility (the isotropic flow when `value = 1`).
    pub fn constant(n: usize, value: f64) -> Self {
        AnisotropyTable { w: 0.0, offset: Offset::None, values: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Periodic trapezoid rule for the integral over a full turn.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * TAU / self.values.len() as f64
    }

    /// Centred first differences.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let d = TAU / n as f64;
        (0..n).map(|j| (self.values[(j + 1) % n] - self.values[(j + n - 1) % n]) / (2.0 * d)).collect()
    }

    /// Centred second differences.
    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.values.len();
        let d = TAU / n as f64;
        (0..n)
            .map(|j| (self.values[(j + 1) % n] - 2.0 * self.values[j] + self.values[(j + n - 1) % n]) / (d * d))
            .collect()
    }
}
