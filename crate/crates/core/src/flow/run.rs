use serde::Serialize;

use super::{AnisotropyTable, FlowError, Offset, SupportFunction};

/// Time-stepping controls for [`flow_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    /// `dt = dt_safety * dtheta^2 / (a_max k_max^2)`.
    pub dt_safety: f64,
    /// Stop once the diameter is below `factor * dtheta * max h(0)`.
    pub min_diameter_factor: f64,
    /// Extra times at which the state is recorded.
    pub sample_times: Vec<f64>,
    /// A loss of convexity before `guard * t_f` is an error; later it ends
    /// the run quietly.
    pub guard: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { dt_safety: 0.4, min_diameter_factor: 10.0, sample_times: Vec::new(), guard: 0.95 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub time: f64,
    pub support: SupportFunction,
    pub curvature: Vec<f64>,
    pub area: f64,
    pub length: f64,
    pub k_max: f64,
    pub k_min: f64,
    /// `int a log(a k) dtheta`.
    pub entropy: f64,
    /// `t + Area(t) / int a`: the extinction time if the area keeps
    /// decreasing at its exact rate.
    pub tf_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Reached,
    Diameter,
    NearExtinction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    /// Recorded states: the initial one, each sample time, and the last one.
    pub states: Vec<FlowState>,
    pub stop: StopReason,
    pub steps: u64,
}

impl FlowRun {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("a run always records its initial state")
    }

    /// The recorded state at time `t`, if any.
    pub fn at(&self, t: f64) -> Option<&FlowState> {
        self.states.iter().find(|s| (s.time - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

fn state(time: f64, h: &SupportFunction, k: Vec<f64>, a: &AnisotropyTable, a_int: f64) -> FlowState {
    let d = h.dtheta();
    let area = h.area();
    let entropy = a.values().iter().zip(&k).map(|(a, k)| a * (a * k).ln()).sum::<f64>() * d;
    FlowState {
        time,
        k_max: k.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        k_min: k.iter().copied().fold(f64::INFINITY, f64::min),
        area,
        length: h.length(),
        entropy,
        tf_estimate: time + area / a_int,
        support: h.clone(),
        curvature: k,
    }
}

/// Evolves `d/dt h = -a k` by explicit Euler steps under the parabolic
/// step bound, recording the state at the sample times and at `t_end`.
pub fn flow_run(
    initial: &SupportFunction,
    a: &AnisotropyTable,
    t_end: f64,
    opts: &FlowOptions,
) -> Result<FlowRun, FlowError> {
    let n = initial.len();
    if n < 8 || !n.is_multiple_of(4) {
        return Err(FlowError::BadGrid);
    }
    if a.len() != n {
        return Err(FlowError::GridMismatch(n, a.len()));
    }
    if a.min() <= 0.0 {
        return Err(FlowError::NonPositiveMobility(a.min()));
    }
    let d = initial.dtheta();
    let a_int = a.integral();
    let a_max = a.max();
    let min_diameter = opts.min_diameter_factor * d * initial.max();
    let mut h = initial.clone();
    let mut k = h.curvature()?;
    let mut t = 0.0;
    let mut steps = 0u64;
    let mut states = vec![state(0.0, &h, k.clone(), a, a_int)];
    let mut targets: Vec<f64> = opts.sample_times.iter().copied().filter(|&s| s > 0.0 && s < t_end).collect();
    targets.push(t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    for &target in &targets {
        while t < target {
            let k_max = k.iter().copied().fold(0.0, f64::max);
            let mut dt = opts.dt_safety * d * d / (a_max * k_max * k_max);
            let last = t + dt >= target;
            if last {
                dt = target - t;
            }
            for ((hj, aj), kj) in h.values_mut().iter_mut().zip(a.values()).zip(&k) {
                *hj -= dt * aj * kj;
            }
            t = if last { target } else { t + dt };
            steps += 1;
            match h.curvature() {
                Ok(new_k) => k = new_k,
                Err(_) => {
                    let tf = t + h.area().max(0.0) / a_int;
                    if t < opts.guard * tf {
                        return Err(FlowError::BlowUp { time: t, k_max, guard: opts.guard * tf });
                    }
                    return Ok(FlowRun { states, stop: StopReason::NearExtinction, steps });
                }
            }
            if h.diameter() < min_diameter {
                states.push(state(t, &h, k, a, a_int));
                return Ok(FlowRun { states, stop: StopReason::Diameter, steps });
            }
        }
        states.push(state(t, &h, k.clone(), a, a_int));
    }
    Ok(FlowRun { states, stop: StopReason::Reached, steps })
}

/// Controls for [`flow_limit`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitOptions {
    pub offset: Offset,
    /// Stop refining once successive solutions differ by less than this.
    pub cauchy_tol: f64,
    /// Allowed violation of `h(w') <= h(w)` for `w' < w`.
    pub monotone_tol: f64,
    pub flow: FlowOptions,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions { offset: Offset::default(), cauchy_tol: 1e-4, monotone_tol: 1e-9, flow: FlowOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowLimit {
    /// Polynomial extrapolation to `w = 0` through the last three solutions
    /// (fewer when fewer were computed).
    pub support: SupportFunction,
    pub ws_used: Vec<f64>,
    pub solutions: Vec<SupportFunction>,
    /// `sup |h(w_i) - h(w_{i-1})|` for each refinement.
    pub sup_differences: Vec<f64>,
}

/// Solves the regularised flow for a decreasing sequence of `w` and
/// extrapolates to `w = 0`. The initial support is used unchanged for
/// every `w`.
pub fn flow_limit(
    initial: &SupportFunction,
    t: f64,
    ws: &[f64],
    opts: &LimitOptions,
) -> Result<FlowLimit, FlowError> {
    if ws.is_empty() || ws.iter().any(|&w| w <= 0.0) || ws.windows(2).any(|p| p[1] >= p[0]) {
        return Err(FlowError::BadSequence);
    }
    if t == 0.0 {
        return Ok(FlowLimit {
            support: initial.clone(),
            ws_used: Vec::new(),
            solutions: Vec::new(),
            sup_differences: Vec::new(),
        });
    }
    let n = initial.len();
    let mut ws_used = Vec::new();
    let mut solutions: Vec<SupportFunction> = Vec::new();
    let mut sup_differences = Vec::new();
    for &w in ws {
        let table = AnisotropyTable::new(n, w, opts.offset);
        let run = flow_run(initial, &table, t, &opts.flow)?;
        let h = run.last().support.clone();
        if let (Some(prev), Some(&w_prev)) = (solutions.last(), ws_used.last()) {
            let excess = h.values().iter().zip(prev.values()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
            if excess > opts.monotone_tol {
                return Err(FlowError::NonMonotone { w_small: w, w_large: w_prev, excess });
            }
            let diff = h.values().iter().zip(prev.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            sup_differences.push(diff);
        }
        ws_used.push(w);
        solutions.push(h);
        if sup_differences.last().is_some_and(|&d| d < opts.cauchy_tol) {
            break;
        }
    }
    // Polynomial extrapolation to w = 0 through the last (up to) three
    // solutions, in Lagrange form.
    let m = solutions.len();
    let first = m.saturating_sub(3);
    let (hs, ws_fit) = (&solutions[first..], &ws_used[first..]);
    let weights: Vec<f64> = (0..hs.len())
        .map(|i| {
            (0..hs.len()).filter(|&j| j != i).map(|j| ws_fit[j] / (ws_fit[j] - ws_fit[i])).product()
        })
        .collect();
    let support = SupportFunction::new(
        (0..n).map(|j| hs.iter().zip(&weights).map(|(h, c)| c * h.values()[j]).sum()).collect(),
    );
    Ok(FlowLimit { support, ws_used, solutions, sup_differences })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub k_max: f64,
    pub k_min: f64,
    /// `max |d/dtheta (a k)|`.
    pub lipschitz_ak: f64,
    pub entropy: f64,
    /// `min (g g'' + g^2) / a` with `g = a k`.
    pub u_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    /// `k_min(t) >= (a_min / a_max) k_min(0)` at every recorded time.
    pub k_min_bound_holds: bool,
    /// `u >= -1 / (2t)` at every recorded positive time.
    pub u_bound_holds: bool,
    /// Largest `k_max(t) / k_max(0)`.
    pub k_max_growth: f64,
}

/// Regularity diagnostics along a run.
pub fn flow_diagnostics(run: &FlowRun, a: &AnisotropyTable) -> DiagnosticsReport {
    let av = a.values();
    let ratio = a.min() / a.max();
    let mut rows = Vec::new();
    for s in &run.states {
        let n = s.curvature.len();
        let d = s.support.dtheta();
        let g: Vec<f64> = av.iter().zip(&s.curvature).map(|(a, k)| a * k).collect();
        let lipschitz_ak = (0..n).map(|j| (g[(j + 1) % n] - g[j]).abs() / d).fold(0.0, f64::max);
        let u_min = (0..n)
            .map(|j| {
                let g2 = (g[(j + 1) % n] - 2.0 * g[j] + g[(j + n - 1) % n]) / (d * d);
                (g[j] * g2 + g[j] * g[j]) / av[j]
            })
            .fold(f64::INFINITY, f64::min);
        rows.push(DiagnosticsRow { time: s.time, k_max: s.k_max, k_min: s.k_min, lipschitz_ak, entropy: s.entropy, u_min });
    }
    let k0 = rows.first().map(|r| r.k_min).unwrap_or(0.0);
    let kmax0 = rows.first().map(|r| r.k_max).unwrap_or(1.0);
    let tol = 1e-9;
    DiagnosticsReport {
        k_min_bound_holds: rows.iter().all(|r| r.k_min >= ratio * k0 - tol),
        u_bound_holds: rows.iter().filter(|r| r.time > 0.0).all(|r| r.u_min >= -1.0 / (2.0 * r.time) - tol),
        k_max_growth: rows.iter().map(|r| r.k_max / kmax0).fold(0.0, f64::max),
        rows,
    }
}

/// Evolves the curvature directly, `d/dt k = k^2 (a k)'' + a k^3`, by
/// explicit Euler. Used to cross-check the support-function scheme.
pub fn curvature_run(k0: &[f64], a: &AnisotropyTable, t_end: f64, dt_safety: f64) -> Vec<f64> {
    let n = k0.len();
    let d = std::f64::consts::TAU / n as f64;
    let av = a.values();
    let a_max = a.max();
    let mut k = k0.to_vec();
    let mut t = 0.0;
    while t < t_end {
        let k_max = k.iter().copied().fold(0.0, f64::max);
        let dt = (dt_safety * d * d / (a_max * k_max * k_max)).min(t_end - t);
        let g: Vec<f64> = av.iter().zip(&k).map(|(a, k)| a * k).collect();
        let next: Vec<f64> = (0..n)
            .map(|j| {
                let g2 = (g[(j + 1) % n] - 2.0 * g[j] + g[(j + n - 1) % n]) / (d * d);
                k[j] + dt * (k[j] * k[j] * g2 + av[j] * k[j].powi(3))
            })
            .collect();
        k = next;
        t += dt;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::build_shape;

    const ALPHA: f64 = 0.305_102_521_149_083_87;

    #[test]
    fn isotropic_circle_radius() {
        let n = 256;
        let h0 = SupportFunction::circle(n, 1.5, [0.0, 0.0]);
        let a = AnisotropyTable::constant(n, 1.0);
        let opts = FlowOptions { sample_times: vec![0.2, 0.5, 0.9], dt_safety: 0.1, ..Default::default() };
        let run = flow_run(&h0, &a, 1.0, &opts).unwrap();
        for s in &run.states {
            let r = (1.5f64 * 1.5 - 2.0 * s.time).sqrt();
            let err = s.support.values().iter().map(|h| (h - r).abs()).fold(0.0, f64::max);
            assert!(err < 1e-4, "t={} err={err}", s.time);
            assert!((s.entropy - std::f64::consts::TAU * (1.0 / r).ln()).abs() < 1e-3);
        }
        assert!((run.last().tf_estimate - 1.125).abs() < 1e-4);
    }

    #[test]
    fn area_decreases_at_the_integrated_mobility() {
        let n = 256;
        let h0 = SupportFunction::ellipse(n, 2.0, 1.0);
        let a = AnisotropyTable::exact(n);
        let opts = FlowOptions { sample_times: (1..10).map(|i| 0.2 * i as f64).collect(), ..Default::default() };
        let run = flow_run(&h0, &a, 2.0, &opts).unwrap();
        let a0 = run.states[0].area;
        for s in &run.states {
            assert!((s.area - (a0 - s.time * a.integral())).abs() < 1e-3, "t={}", s.time);
        }
        for p in run.states.windows(2) {
            assert!(p[1].length <= p[0].length + 1e-12);
        }
        let diag = flow_diagnostics(&run, &a);
        assert!(diag.k_min_bound_holds && diag.u_bound_holds, "{diag:?}");
    }

    #[test]
    fn ellipse_extinction_time_is_half_the_area() {
        let n = 128;
        let h0 = SupportFunction::ellipse(n, 2.0, 1.0);
        let a = AnisotropyTable::exact(n);
        let run = flow_run(&h0, &a, 10.0, &FlowOptions::default()).unwrap();
        assert_ne!(run.stop, StopReason::Reached);
        assert!((run.last().tf_estimate - std::f64::consts::PI).abs() < 1e-3 * std::f64::consts::PI);
    }

    #[test]
    fn nested_initial_curves_stay_nested() {
        let n = 128;
        let big = SupportFunction::ellipse(n, 2.0, 1.2);
        let small = SupportFunction::circle(n, 1.0, [0.1, 0.0]);
        let a = AnisotropyTable::exact(n);
        let opts = FlowOptions { sample_times: vec![0.1, 0.2, 0.3], ..Default::default() };
        let rb = flow_run(&big, &a, 0.4, &opts).unwrap();
        let rs = flow_run(&small, &a, 0.4, &opts).unwrap();
        for (b, s) in rb.states.iter().zip(&rs.states) {
            assert!(b.support.values().iter().zip(s.support.values()).all(|(x, y)| x >= y));
        }
    }

    #[test]
    fn invariant_shape_shrinks_homothetically() {
        let n = 256;
        let shape = build_shape(ALPHA, 8);
        let h0 = SupportFunction::new(shape.support_table(n));
        let a = AnisotropyTable::new(n, 0.1, Offset::None);
        let tf = 0.5 / ALPHA;
        let times: Vec<f64> = [0.2, 0.5, 0.8].iter().map(|s| s * tf).collect();
        let opts = FlowOptions { sample_times: times.clone(), ..Default::default() };
        let run = flow_run(&h0, &a, times[2], &opts).unwrap();
        for &t in &times {
            let s = run.at(t).unwrap();
            let scale = (1.0 - 2.0 * ALPHA * t).sqrt();
            let err = s
                .support
                .values()
                .iter()
                .zip(h0.values())
                .map(|(h, h0)| (h / h0 - scale).abs() / scale)
                .fold(0.0, f64::max);
            assert!(err < 1e-2, "t={t} err={err}");
        }
    }

    #[test]
    fn curvature_equation_agrees_with_support_scheme() {
        let n = 128;
        let h0 = SupportFunction::ellipse(n, 1.5, 1.0);
        let a = AnisotropyTable::new(n, 0.2, Offset::None);
        let run = flow_run(&h0, &a, 0.05, &FlowOptions::default()).unwrap();
        let k = curvature_run(&h0.curvature().unwrap(), &a, 0.05, 0.1);
        let err = k.iter().zip(&run.last().curvature).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn limit_at_time_zero_is_the_initial_support() {
        let h0 = SupportFunction::circle(64, 1.0, [0.0, 0.0]);
        let lim = flow_limit(&h0, 0.0, &[0.2, 0.1], &LimitOptions::default()).unwrap();
        assert_eq!(lim.support, h0);
    }

    #[test]
    fn limit_in_w_is_monotone_and_cauchy() {
        let n = 128;
        let shape = build_shape(ALPHA, 8);
        let h0 = SupportFunction::new(shape.support_table(n));
        // With the default shift 1.5 w the mobility at w = 0.2 would turn
        // negative near the diagonals; a shift of w is still enough for the
        // ordering in w.
        let opts = LimitOptions { cauchy_tol: 0.0, offset: Offset::Linear(1.0), ..Default::default() };
        let t = 0.5;
        let lim = flow_limit(&h0, t, &[0.2, 0.1, 0.05, 0.025], &opts).unwrap();
        let d = &lim.sup_differences;
        assert_eq!(d.len(), 3);
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
        let area = lim.support.area();
        assert!((area - (h0.area() - 2.0 * t)).abs() < 1e-3, "{area} vs {}", h0.area() - 2.0 * t);
    }

    #[test]
    fn negative_mobility_is_rejected() {
        let h0 = SupportFunction::circle(64, 1.0, [0.0, 0.0]);
        let a = AnisotropyTable::new(64, 0.2, Offset::Linear(1.5));
        assert!(matches!(flow_run(&h0, &a, 0.1, &FlowOptions::default()), Err(FlowError::NonPositiveMobility(_))));
    }

    #[test]
    fn bad_sequences_are_rejected() {
        let h0 = SupportFunction::circle(64, 1.0, [0.0, 0.0]);
        assert_eq!(flow_limit(&h0, 0.1, &[0.1, 0.2], &LimitOptions::default()), Err(FlowError::BadSequence));
        assert_eq!(flow_limit(&h0, 0.1, &[], &LimitOptions::default()), Err(FlowError::BadSequence));
    }
}
