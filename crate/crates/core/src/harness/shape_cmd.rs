use std::f64::consts::{FRAC_PI_2, PI};

use super::svg::SvgCanvas;
use super::{Check, ExperimentConfig, HarnessError, OutDir};
use crate::flow::anisotropy_exact;
use crate::quadrature::integrate_pieces;
use crate::shape::{build_shape, solve_alpha, verify_invariant_ode};

/// Solves for the self-similar droplet and writes `shape.json`,
/// `boundary.csv` and `support.csv` together with every identity it should
/// satisfy.
pub fn cmd_shape(config: &ExperimentConfig, out: &OutDir) -> Result<Vec<Check>, HarnessError> {
    let root = solve_alpha(1e-14)?;
    let shape = build_shape(root.alpha, 4096);
    let breaks: Vec<f64> = (0..=8).map(|k| k as f64 * PI / 4.0).collect();
    let a_integral = integrate_pieces(anisotropy_exact, &breaks, 1e-14).value;
    let ode = verify_invariant_ode(root.alpha, 1001);
    let pole = shape.curvature(FRAC_PI_2);
    let area_identity = root.alpha * shape.polyline_area() - 1.0;
    let bc = ode.endpoint_value.abs().max(ode.endpoint_slopes.0.abs()).max(ode.endpoint_slopes.1.abs());

    let mut checks = vec![
        Check::at_most("alpha root residual", root.residual.abs(), 1e-12),
        Check::at_most("alpha * polygon area - 1", area_identity.abs(), 1e-6),
        Check::at_most("integral of a - 2", (a_integral - 2.0).abs(), 1e-10),
        Check::at_most("boundary conditions", bc, 1e-6),
        Check::at_most("pole curvature - 2 alpha", (pole - 2.0 * root.alpha).abs(), 1e-4),
    ];
    if config.check_ode {
        checks.push(Check::at_most("profile ODE residual", ode.analytic, 1e-8));
    }

    out.write_json(
        "shape.json",
        &serde_json::json!({
            "alpha": root.alpha,
            "beta": shape.beta,
            "area": shape.area(),
            "polygon_area": shape.polyline_area(),
            "extinction_time": shape.extinction_time(),
            "inradius": shape.inradius(),
            "alpha_iterations": root.iterations,
            "residuals": {
                "alpha_root": root.residual,
                "area_identity": area_identity,
                "mobility_integral": a_integral - 2.0,
                "ode_analytic": ode.analytic,
                "ode_finite_difference": ode.finite_difference,
                "endpoint_value": ode.endpoint_value,
                "endpoint_slopes": [ode.endpoint_slopes.0, ode.endpoint_slopes.1],
                "pole_curvature": pole - 2.0 * root.alpha,
            },
        }),
    )?;
    let boundary: Vec<(f64, f64)> = shape.boundary.iter().map(|p| (p[0], p[1])).collect();
    out.write_csv("boundary.csv", &["x", "y"], &boundary)?;
    let n = config.flow_points;
    let support: Vec<(f64, f64)> =
        shape.support_table(n).into_iter().enumerate().map(|(j, h)| (2.0 * PI * j as f64 / n as f64, h)).collect();
    out.write_csv("support.csv", &["theta", "h"], &support)?;
    if config.svg {
        let (lo, hi) = shape.polygon().bounds();
        let mut c = SvgCanvas::new(lo, hi, 600.0);
        c.polygon(&shape.boundary, "black", "#cfe2f3");
        out.write_text("shape.svg", &c.finish())?;
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_hold() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig { check_ode: true, svg: true, out: dir.path().to_path_buf(), ..Default::default() };
        let checks = cmd_shape(&c, &OutDir::create(dir.path()).unwrap()).unwrap();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        // the written support table reads back as a strictly convex droplet
        let h = crate::harness::read_support_csv(&dir.path().join("support.csv")).unwrap();
        assert!((h.area() * 0.305_102_521_149_083_87 - 1.0).abs() < 1e-3);
        assert!(std::fs::read_to_string(dir.path().join("shape.svg")).unwrap().contains("<polygon"));
    }
}
