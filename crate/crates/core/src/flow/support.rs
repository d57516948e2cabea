use std::f64::consts::TAU;

use super::FlowError;
use crate::geometry::{ConvexPolygon, Point};

/// Support function `h(theta) = sup { p . (cos theta, sin theta) : p in K }`
/// sampled on the uniform grid `theta_j = 2 pi j / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction {
    h: Vec<f64>,
}

impl SupportFunction {
    pub fn new(h: Vec<f64>) -> Self {
        SupportFunction { h }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Self {
        SupportFunction { h: (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect() }
    }

    /// Disk of radius `r` centred at `c`.
    pub fn circle(n: usize, r: f64, c: Point) -> Self {
        Self::from_fn(n, |t| r + c[0] * t.cos() + c[1] * t.sin())
    }

    /// Centred ellipse with semi-axes `a` (horizontal) and `b` (vertical).
    pub fn ellipse(n: usize, a: f64, b: f64) -> Self {
        Self::from_fn(n, |t| (a * a * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt())
    }

    /// Support function of a convex polygon.
    pub fn of_polygon(n: usize, poly: &ConvexPolygon) -> Self {
        Self::from_fn(n, |t| poly.support([t.cos(), t.sin()]))
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.h.len() as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.h.len() as f64
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.h.len()).map(|j| self.theta(j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.h
    }

    pub fn max(&self) -> f64 {
        self.h.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Radius of curvature `h'' + h` with the centred periodic stencil.
    pub fn radius_of_curvature(&self) -> Vec<f64> {
        let n = self.h.len();
        let d2 = self.dtheta().powi(2);
        (0..n).map(|j| (self.h[(j + 1) % n] - 2.0 * self.h[j] + self.h[(j + n - 1) % n]) / d2 + self.h[j]).collect()
    }

    /// Curvature `1 / (h'' + h)`; fails where `h'' + h <= 0`.
    pub fn curvature(&self) -> Result<Vec<f64>, FlowError> {
        self.radius_of_curvature()
            .into_iter()
            .enumerate()
            .map(|(j, r)| if r > 0.0 { Ok(1.0 / r) } else { Err(FlowError::NonConvex { theta: self.theta(j), value: r }) })
            .collect()
    }

    /// Centred first differences `h'`.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.h.len();
        let d = self.dtheta();
        (0..n).map(|j| (self.h[(j + 1) % n] - self.h[(j + n - 1) % n]) / (2.0 * d)).collect()
    }

    /// Perimeter `int h dtheta`.
    pub fn length(&self) -> f64 {
        self.h.iter().sum::<f64>() * self.dtheta()
    }

    /// Area `1/2 int h (h'' + h) dtheta`. With the discrete stencil this is a
    /// quadratic form whose time derivative along the flow is exactly
    /// `-sum a dtheta`.
    pub fn area(&self) -> f64 {
        let r = self.radius_of_curvature();
        0.5 * self.h.iter().zip(&r).map(|(h, r)| h * r).sum::<f64>() * self.dtheta()
    }

    /// Largest width `max_theta h(theta) + h(theta + pi)` (needs an even grid).
    pub fn diameter(&self) -> f64 {
        let n = self.h.len();
        (0..n / 2).map(|j| self.h[j] + self.h[j + n / 2]).fold(0.0, f64::max)
    }

    /// `h + delta`: support of the Minkowski sum with a disk of radius delta.
    pub fn dilated(&self, delta: f64) -> Self {
        SupportFunction { h: self.h.iter().map(|x| x + delta).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        SupportFunction { h: self.h.iter().map(|x| x * s).collect() }
    }

    /// Intersection of the support half-planes.
    pub fn polygon(&self) -> Option<ConvexPolygon> {
        ConvexPolygon::from_support(&self.thetas(), &self.h)
    }

    /// Boundary points from `x(theta) = x(0) - int_0^theta sin(s) (h''+h)(s) ds`
    /// and `y(theta) = y(pi/2) + int_{pi/2}^theta cos(s) (h''+h)(s) ds`
    /// (trapezoid rule), starting from the exact points `x(0) = h(0)` and
    /// `y = h(theta) sin(theta) + h'(theta) cos(theta)` at the grid angle
    /// closest to `pi/2`.
    pub fn curve(&self) -> Result<ConvexCurve, FlowError> {
        let n = self.h.len();
        let r = self.radius_of_curvature();
        if let Some(j) = r.iter().position(|&v| v <= 0.0) {
            return Err(FlowError::NonConvex { theta: self.theta(j), value: r[j] });
        }
        let d = self.dtheta();
        let dh = self.derivative();
        let sx: Vec<f64> = (0..=n).map(|j| -r[j % n] * self.theta(j).sin()).collect();
        let sy: Vec<f64> = (0..=n).map(|j| r[j % n] * self.theta(j).cos()).collect();
        let mut x = vec![0.0; n + 1];
        let mut y = vec![0.0; n + 1];
        x[0] = self.h[0];
        let jq = ((n as f64) / 4.0).round() as usize % n;
        for j in 0..n {
            x[j + 1] = x[j] + 0.5 * (sx[j] + sx[j + 1]) * d;
            y[j + 1] = y[j] + 0.5 * (sy[j] + sy[j + 1]) * d;
        }
        // Shift y so that it is exact at the anchor angle.
        let tq = self.theta(jq);
        let shift = self.h[jq] * tq.sin() + dh[jq] * tq.cos() - y[jq];
        y.iter_mut().for_each(|v| *v += shift);
        let closure_defect = (x[n] - x[0]).hypot(y[n] - y[0]);
        let points = (0..n).map(|j| [x[j], y[j]]).collect();
        Ok(ConvexCurve { points, closure_defect })
    }
}

/// Closed boundary polyline reconstructed from a support function.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCurve {
    /// Point with outward normal at `theta_j`, for each grid angle.
    pub points: Vec<Point>,
    /// Distance between the end of the integrated loop and its start.
    pub closure_defect: f64,
}

impl ConvexCurve {
    pub fn length(&self) -> f64 {
        crate::geometry::polyline_length(&self.points, true)
    }

    pub fn area(&self) -> f64 {
        crate::geometry::polygon_area(&self.points)
    }
}

/// Dilation (`delta > 0`) or erosion (`delta < 0`) of the convex set with
/// support `h`: the intersection of the half-planes `p . v <= h + delta`.
/// Dilation of a convex set by a disk adds `delta` to `h` exactly; for
/// erosion the half-plane intersection is the set of points at distance at
/// least `|delta|` from the complement. Returns `None` when erosion empties
/// the set.
pub fn region_dilate_erode(h: &SupportFunction, delta: f64) -> Option<ConvexPolygon> {
    h.dilated(delta).polygon()
}
