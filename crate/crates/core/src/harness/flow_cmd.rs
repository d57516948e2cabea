use serde::Serialize;

use super::svg::{color, SvgCanvas};
use super::{Check, Droplet, ExperimentConfig, HarnessError, Mobility, OutDir};
use crate::flow::{flow_run, region_dilate_erode, FlowOptions, FlowRun, StopReason, SupportFunction};

/// Per-width outcome of [`cmd_flow`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSummary {
    pub width: f64,
    /// `int a dtheta` of the smoothed table.
    pub mobility_integral: f64,
    pub tf_expected: f64,
    pub tf_estimate: f64,
    pub tf_relative_error: f64,
    pub stop: StopReason,
    pub steps: u64,
    /// `sup_theta |h(theta,t) / (s(t) h(theta,0)) - 1|` with
    /// `s(t) = sqrt(1 - 2 alpha t)`, over sample times up to `0.8 t_f`;
    /// only for the self-similar droplet.
    pub homothety_error: Option<f64>,
}

/// Rejects support functions whose radius of curvature drops below the
/// angular resolution somewhere (corners and flat sides).
pub(crate) fn check_strictly_convex(h: &SupportFunction, what: &str) -> Result<(), HarnessError> {
    let floor = h.dtheta() * h.max();
    let r_min = h.radius_of_curvature().into_iter().fold(f64::INFINITY, f64::min);
    if r_min > floor {
        Ok(())
    } else {
        Err(HarnessError::NonConvex(format!("{what}: radius of curvature {r_min:.3e} below {floor:.3e}")))
    }
}

/// Default macroscopic sample times `{0.2, 0.5, 0.8} t_f`.
pub(crate) fn flow_sample_times(config: &ExperimentConfig, tf: f64) -> Vec<f64> {
    let mut t = if config.times.is_empty() { vec![0.2 * tf, 0.5 * tf, 0.8 * tf] } else { config.times.clone() };
    t.sort_by(f64::total_cmp);
    t
}

/// Runs the flow for one smoothing width until the curve collapses,
/// recording `times` on the way.
pub(crate) fn run_width(
    config: &ExperimentConfig,
    h0: &SupportFunction,
    w: f64,
    times: &[f64],
) -> Result<FlowRun, HarnessError> {
    let table = config.mobility_table(w);
    let tf = h0.area() / table.integral();
    let opts = FlowOptions { sample_times: times.to_vec(), ..Default::default() };
    Ok(flow_run(h0, &table, tf, &opts)?)
}

/// Evolves the droplet under the anisotropic curve-shortening flow for every
/// configured smoothing width, writes `D(t)` and its `+-delta` neighbourhoods
/// at the sample times, and checks the extinction time against
/// `Area / int a` (and the homothety of the self-similar droplet).
pub fn cmd_flow(config: &ExperimentConfig, out: &OutDir) -> Result<Vec<Check>, HarnessError> {
    let droplet = config.droplet()?;
    let h0 = droplet.support(config.flow_points);
    check_strictly_convex(&h0, &config.region_descriptor())?;
    let tf_expected = droplet.area() / config.mobility_integral();
    let times = flow_sample_times(config, tf_expected);
    let tf_tol = if config.mobility == Mobility::Isotropic { 1e-4 } else { 1e-3 };
    let alpha = match &droplet {
        Droplet::Invariant(s) if config.mobility == Mobility::Ising => Some(s.alpha),
        _ => None,
    };

    let mut summaries = Vec::new();
    let mut support_rows = Vec::new();
    let mut dilation_rows = Vec::new();
    let mut checks = Vec::new();
    let mut curves = Vec::new();
    for &w in &config.flow_widths {
        let run = run_width(config, &h0, w, &times)?;
        let tf_estimate = run.last().tf_estimate;
        let mut homothety: Option<f64> = None;
        for &t in &times {
            let Some(s) = run.at(t) else { continue };
            for (j, v) in s.support.values().iter().enumerate() {
                support_rows.push((w, t, j, s.support.theta(j), *v));
            }
            for (sign, name) in [(1.0, "dilate"), (-1.0, "erode")] {
                if let Some(p) = region_dilate_erode(&s.support, sign * config.delta) {
                    for (k, v) in p.vertices().iter().enumerate() {
                        dilation_rows.push((w, t, name, k, v[0], v[1]));
                    }
                }
            }
            if let Some(alpha) = alpha.filter(|a| t <= 0.8 / (2.0 * a) * (1.0 + 1e-12)) {
                let scale = (1.0 - 2.0 * alpha * t).sqrt();
                let err = s
                    .support
                    .values()
                    .iter()
                    .zip(h0.values())
                    .map(|(h, h0)| (h / (scale * h0) - 1.0).abs())
                    .fold(0.0, f64::max);
                homothety = Some(homothety.unwrap_or(0.0).max(err));
            }
            if w == config.flow_widths[config.flow_widths.len() - 1] {
                if let Some(p) = s.support.polygon() {
                    curves.push(p);
                }
            }
        }
        let rel = (tf_estimate / tf_expected - 1.0).abs();
        checks.push(Check::at_most(format!("w={w}: extinction time relative error"), rel, tf_tol));
        if let Some(e) = homothety {
            checks.push(Check::at_most(format!("w={w}: homothety relative error"), e, 1e-2));
        }
        summaries.push(FlowSummary {
            width: w,
            mobility_integral: config.mobility_table(w).integral(),
            tf_expected,
            tf_estimate,
            tf_relative_error: rel,
            stop: run.stop,
            steps: run.steps,
            homothety_error: homothety,
        });
    }
    out.write_csv("flow.csv", &["w", "t", "theta_index", "theta", "h"], &support_rows)?;
    out.write_csv("dilations.csv", &["w", "t", "kind", "vertex", "x", "y"], &dilation_rows)?;
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "region": config.region_descriptor(),
            "mobility": config.mobility,
            "flow_points": config.flow_points,
            "delta": config.delta,
            "sample_times": times,
            "tf_expected": tf_expected,
            "widths": summaries,
        }),
    )?;
    if config.svg {
        let p0 = droplet.polygon();
        let (lo, hi) = p0.bounds();
        let mut c = SvgCanvas::new(lo, hi, 600.0);
        c.polygon(p0.vertices(), "black", "none");
        for (i, p) in curves.iter().enumerate() {
            c.polygon(p.vertices(), color(i), "none");
        }
        out.write_text("flow.svg", &c.finish())?;
    }
    Ok(checks)
}

/// Support functions of the smallest width at each sample time, as written
/// by [`cmd_flow`], together with the region descriptor of that run.
pub(crate) fn read_flow_dir(
    dir: &std::path::Path,
) -> Result<(String, Vec<(f64, SupportFunction)>), HarnessError> {
    let summary_path = dir.join("summary.json");
    let text = std::fs::read_to_string(&summary_path).map_err(|e| HarnessError::io(&summary_path, e))?;
    let summary: serde_json::Value = serde_json::from_str(&text)?;
    let region = summary["region"].as_str().unwrap_or_default().to_string();
    let csv_path = dir.join("flow.csv");
    let mut rdr =
        csv::Reader::from_path(&csv_path).map_err(|e| HarnessError::Csv(csv_path.display().to_string(), e))?;
    let mut rows: Vec<(f64, f64, usize, f64, f64)> = Vec::new();
    for r in rdr.deserialize() {
        rows.push(r.map_err(|e| HarnessError::Csv(csv_path.display().to_string(), e))?);
    }
    let w_min = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    for (w, t, j, _, h) in rows {
        if w != w_min {
            continue;
        }
        if out.last().is_none_or(|(tl, _)| *tl != t) {
            out.push((t, Vec::new()));
        }
        let v = &mut out.last_mut().expect("pushed above").1;
        if v.len() != j {
            return Err(HarnessError::Config(format!("{}: support rows out of order", csv_path.display())));
        }
        v.push(h);
    }
    Ok((region, out.into_iter().map(|(t, h)| (t, SupportFunction::new(h))).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RegionKind;

    fn run_in(config: ExperimentConfig) -> (Vec<Check>, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig { out: dir.path().to_path_buf(), ..config };
        let checks = cmd_flow(&c, &OutDir::create(dir.path()).unwrap()).unwrap();
        (checks, dir)
    }

    #[test]
    fn isotropic_circle_extinction_time() {
        let (checks, _d) = run_in(ExperimentConfig {
            region: RegionKind::Disk,
            radius: 0.7,
            mobility: Mobility::Isotropic,
            flow_widths: vec![0.1],
            ..Default::default()
        });
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn ellipse_extinction_time() {
        let (checks, dir) = run_in(ExperimentConfig {
            region: RegionKind::Ellipse,
            flow_points: 256,
            flow_widths: vec![0.1],
            ..Default::default()
        });
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        let (region, states) = read_flow_dir(dir.path()).unwrap();
        assert_eq!(region, "ellipse semi_axes=2x1");
        assert_eq!(states.len(), 3);
        assert!(states.iter().all(|(_, h)| h.len() == 256));
    }

    #[test]
    fn square_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig { region: RegionKind::Square, flow_points: 256, ..Default::default() };
        let err = cmd_flow(&c, &OutDir::create(dir.path()).unwrap()).unwrap_err();
        assert!(matches!(err, HarnessError::NonConvex(_)), "{err}");
    }
}
