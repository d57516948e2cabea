use rayon::prelude::*;
use serde::Serialize;

use super::flow_cmd::{check_strictly_convex, flow_sample_times, read_flow_dir, run_width};
use super::simulate::TauStats;
use super::svg::{color, SvgCanvas};
use super::verify::wilson_interval;
use super::{Check, CompareMode, Droplet, ExperimentConfig, HarnessError, OutDir};
use crate::flow::region_dilate_erode;
use crate::geometry::{one_sided_distance, ConvexPolygon, PixelSet, PlanarSet, Point};
use crate::glauber::{Glauber, SpinConfiguration};

/// Outcome of testing `inner ⊂ A ⊂ outer` for a pixel droplet `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inclusion {
    /// `A ⊂ outer`.
    pub outer: bool,
    /// `inner ⊂ A`.
    pub inner: bool,
    /// `sup_{a in A} dist(a, outer)`; infinite when `outer` is empty and `A`
    /// is not.
    pub excess: f64,
    /// `sup_{p in inner} dist(p, A)`, evaluated on the boundary of `inner`
    /// and on one witness point per uncovered cell; infinite when `A` is
    /// empty and `inner` is not.
    pub deficit: f64,
}

/// A single point, as a planar set for distance queries.
struct Witness(Point);

impl PlanarSet for Witness {
    fn contains_point(&self, p: Point) -> bool {
        p == self.0
    }
    fn boundary_segments(&self) -> Vec<[Point; 2]> {
        vec![[self.0, self.0]]
    }
}

fn transpose(p: &ConvexPolygon) -> ConvexPolygon {
    ConvexPolygon::from_ccw(p.vertices().iter().rev().map(|v| [v[1], v[0]]).collect())
}

/// Tests both inclusions row by row. A closed cell lies in a convex polygon
/// iff its four corners do, so the outer test compares the extreme cells of
/// each row with the polygon's cross-sections at the row's two edges. For
/// the inner test, every cell whose open column overlaps the polygon's
/// extent within the row's band must be present. `None` stands for the
/// empty set.
pub fn inclusion_test(a: &PixelSet, inner: Option<&ConvexPolygon>, outer: Option<&ConvexPolygon>) -> Inclusion {
    const EPS: f64 = 1e-12;
    let s = a.scale();
    let spacing = 0.25 / s;
    let empty = a.is_empty();

    let (outer_ok, excess) = match outer {
        None => (empty, if empty { 0.0 } else { f64::INFINITY }),
        Some(_) if empty => (true, 0.0),
        Some(p) => {
            let mut ok = true;
            let mut rows: Vec<(i64, i64, i64)> = Vec::new();
            for (i, j) in a.cells() {
                match rows.last_mut() {
                    Some(r) if r.0 == j => {
                        r.1 = r.1.min(i);
                        r.2 = r.2.max(i);
                    }
                    _ => rows.push((j, i, i)),
                }
            }
            for (j, i0, i1) in rows {
                let (x0, x1) = (i0 as f64 / s, (i1 + 1) as f64 / s);
                for y in [j as f64 / s, (j + 1) as f64 / s] {
                    match p.cross_section(y) {
                        Some((lo, hi)) if x0 >= lo - EPS && x1 <= hi + EPS => {}
                        _ => ok = false,
                    }
                }
            }
            let d = one_sided_distance(a, p, spacing).unwrap_or(0.0);
            (ok, d)
        }
    };

    let (inner_ok, deficit) = match inner {
        None => (true, 0.0),
        Some(_) if empty => (false, f64::INFINITY),
        Some(p) => {
            let mut ok = true;
            let mut worst = one_sided_distance(p, a, spacing).unwrap_or(0.0);
            let (lo, hi) = p.bounds();
            let pt = transpose(p);
            for j in (lo[1] * s).floor() as i64..(hi[1] * s).ceil() as i64 {
                let (y0, y1) = (j as f64 / s, (j + 1) as f64 / s);
                let Some((xa, xb)) = p.x_range_in_band(y0, y1) else { continue };
                if xb - xa <= EPS {
                    continue;
                }
                for i in (xa * s).floor() as i64..(xb * s).ceil() as i64 {
                    if a.get(i, j) {
                        continue;
                    }
                    let (cx0, cx1) = ((i as f64 / s).max(xa), ((i + 1) as f64 / s).min(xb));
                    if cx1 - cx0 <= EPS {
                        continue;
                    }
                    ok = false;
                    let x = 0.5 * (cx0 + cx1);
                    if let Some((ya, yb)) = pt.cross_section(x) {
                        let (wy0, wy1) = (ya.max(y0), yb.min(y1));
                        if wy0 <= wy1 {
                            let w = Witness([x, 0.5 * (wy0 + wy1)]);
                            worst = worst.max(one_sided_distance(&w, a, spacing).unwrap_or(0.0));
                        }
                    }
                }
            }
            (ok, worst)
        }
    };
    Inclusion { outer: outer_ok, inner: inner_ok, excess, deficit }
}

/// Which statement applies at a given time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `t <= t_f`: both inclusions.
    Inclusion,
    /// `t_f < t <= t_f + delta`: nothing is asserted.
    NotApplicable,
    /// `t > t_f + delta`: the droplet must be gone.
    Extinct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub seed: u64,
    pub time: f64,
    pub regime: Regime,
    pub outer: Option<bool>,
    pub inner: Option<bool>,
    pub empty: bool,
    pub excess: Option<f64>,
    pub deficit: Option<f64>,
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub region: String,
    pub mode: CompareMode,
    pub size: i64,
    pub delta: f64,
    pub tf: f64,
    pub times: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub applicable: usize,
    pub passes: usize,
    pub pass_rate: f64,
    /// 95% Wilson interval for the pass probability.
    pub pass_rate_ci: (f64, f64),
    pub tau: TauStats,
    pub checks: Vec<super::Check>,
}

/// The deterministic sets `(inner, outer)` at one time, or `None` when
/// nothing is asserted there.
type Bounds = Option<(Option<ConvexPolygon>, Option<ConvexPolygon>)>;

fn deterministic_bounds(config: &ExperimentConfig, droplet: &Droplet, mode: CompareMode, times: &[f64]) -> Result<(f64, Vec<Bounds>), HarnessError> {
    let delta = config.delta;
    if mode == CompareMode::Scaling {
        let Droplet::Invariant(shape) = droplet else {
            return Err(HarnessError::Config("compare_mode = \"scaling\" needs region = \"invariant\"".into()));
        };
        let p = shape.polygon();
        let tf = 0.5 / shape.alpha;
        let bounds = times
            .iter()
            .map(|&t| {
                (t <= tf).then(|| {
                    let s = (1.0 - 2.0 * shape.alpha * t).max(0.0).sqrt();
                    let inner = (s - delta > 0.0).then(|| p.scaled(s - delta));
                    (inner, Some(p.scaled(s + delta)))
                })
            })
            .collect();
        return Ok((tf, bounds));
    }
    let h0 = droplet.support(config.flow_points);
    let tf = droplet.area() / config.mobility_integral();
    let states = match &config.flow_dir {
        Some(dir) => {
            let (region, states) = read_flow_dir(dir)?;
            if region != config.region_descriptor() {
                return Err(HarnessError::RegionMismatch { flow: region, current: config.region_descriptor() });
            }
            times
                .iter()
                .filter(|&&t| t > 0.0 && t <= tf)
                .map(|&t| {
                    states
                        .iter()
                        .find(|(ts, _)| (ts - t).abs() <= 1e-12 * t.max(1.0))
                        .map(|(_, h)| (t, h.clone()))
                        .ok_or(HarnessError::MissingFlowTime { dir: dir.display().to_string(), time: t })
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => {
            check_strictly_convex(&h0, &config.region_descriptor())?;
            let w = config.flow_widths.iter().copied().fold(f64::INFINITY, f64::min);
            let run = run_width(config, &h0, w, times)?;
            times.iter().filter_map(|&t| run.at(t).map(|s| (t, s.support.clone()))).collect()
        }
    };
    let bounds = times
        .iter()
        .map(|&t| {
            if t > tf {
                return None;
            }
            let h = if t == 0.0 { Some(&h0) } else { states.iter().find(|(ts, _)| *ts == t).map(|(_, h)| h) };
            h.map(|h| (region_dilate_erode(h, -delta), region_dilate_erode(h, delta)))
        })
        .collect();
    Ok((tf, bounds))
}

struct SeedOutcome {
    verdicts: Vec<Verdict>,
    tau: f64,
    pixels: Vec<PixelSet>,
}

fn run_seed(
    config: &ExperimentConfig,
    initial: &SpinConfiguration,
    times: &[f64],
    bounds: &[Bounds],
    tf: f64,
    seed: u64,
) -> Result<SeedOutcome, HarnessError> {
    let l = config.size as f64;
    let mut g = Glauber::with_options(initial.clone(), config.variant, config.connectivity, seed);
    let mut verdicts = Vec::new();
    let mut pixels = Vec::new();
    for (&t, b) in times.iter().zip(bounds) {
        g.step_to(t * l * l)?;
        let snap = g.snapshot(l).pixels;
        let empty = snap.is_empty();
        let regime = if t <= tf {
            Regime::Inclusion
        } else if t <= tf + config.delta {
            Regime::NotApplicable
        } else {
            Regime::Extinct
        };
        let mut v = Verdict { seed, time: t, regime, outer: None, inner: None, empty, excess: None, deficit: None, passed: None };
        match (regime, b) {
            (Regime::Inclusion, Some((inner, outer))) => {
                let inc = inclusion_test(&snap, inner.as_ref(), outer.as_ref());
                v.outer = Some(inc.outer);
                v.inner = Some(inc.inner);
                v.excess = Some(inc.excess);
                v.deficit = Some(inc.deficit);
                v.passed = Some(inc.outer && inc.inner);
            }
            (Regime::Extinct, _) => v.passed = Some(empty),
            _ => v.regime = Regime::NotApplicable,
        }
        verdicts.push(v);
        pixels.push(snap);
    }
    let tau = g.disappearance_time()?;
    Ok(SeedOutcome { verdicts, tau, pixels })
}

/// Runs the stochastic droplet for every seed, tests
/// `D^(-delta)(t) ⊂ A_L(L^2 t) / L ⊂ D^(+delta)(t)` at each sample time, and
/// aggregates pass rates and disappearance times.
pub fn cmd_compare(config: &ExperimentConfig, out: &OutDir) -> Result<ComparisonReport, HarnessError> {
    let droplet = config.droplet()?;
    let mode = match config.compare_mode {
        CompareMode::Auto if matches!(droplet, Droplet::Invariant(_)) && config.flow_dir.is_none() => {
            CompareMode::Scaling
        }
        CompareMode::Auto => CompareMode::Flow,
        m => m,
    };
    let tf_default = droplet.area() / config.mobility_integral();
    let times = flow_sample_times(config, tf_default);
    let (tf, bounds) = deterministic_bounds(config, &droplet, mode, &times)?;
    let initial = SpinConfiguration::rasterize(droplet.region(), config.size as f64);
    let seeds = config.seed_values();
    let outcomes: Vec<SeedOutcome> = seeds
        .par_iter()
        .map(|&s| run_seed(config, &initial, &times, &bounds, tf, s))
        .collect::<Result<_, _>>()?;

    let verdicts: Vec<Verdict> = outcomes.iter().flat_map(|o| o.verdicts.iter().cloned()).collect();
    let applicable = verdicts.iter().filter(|v| v.passed.is_some()).count();
    let passes = verdicts.iter().filter(|v| v.passed == Some(true)).count();
    let pass_rate = if applicable == 0 { 1.0 } else { passes as f64 / applicable as f64 };
    let tau = TauStats::new(config.size, droplet.area(), outcomes.iter().map(|o| o.tau).collect());
    let checks = vec![
        Check::at_least("inclusion pass rate", pass_rate, config.pass_rate),
        Check::at_most("tau / (L^2 Area / 2) - 1", (tau.mean_ratio - 1.0).abs(), config.tau_tolerance),
    ];
    let report = ComparisonReport {
        region: config.region_descriptor(),
        mode,
        size: config.size,
        delta: config.delta,
        tf,
        times: times.clone(),
        applicable,
        passes,
        pass_rate,
        pass_rate_ci: wilson_interval(passes, applicable),
        verdicts,
        tau,
        checks,
    };

    let fmt_opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
    let fmt_f = |x: Option<f64>| x.map_or(String::new(), |x| x.to_string());
    let rows: Vec<_> = report
        .verdicts
        .iter()
        .map(|v| {
            let regime = serde_json::to_value(v.regime).expect("enum").as_str().unwrap_or_default().to_string();
            (v.seed, v.time, regime, fmt_opt(v.outer), fmt_opt(v.inner), v.empty, fmt_f(v.excess), fmt_f(v.deficit), fmt_opt(v.passed))
        })
        .collect();
    out.write_csv("verdicts.csv", &["seed", "t", "regime", "outer", "inner", "empty", "excess", "deficit", "passed"], &rows)?;
    let tau_rows: Vec<(u64, f64)> = seeds.iter().copied().zip(report.tau.samples.iter().copied()).collect();
    out.write_csv("tau.csv", &["seed", "tau"], &tau_rows)?;
    out.write_json("report.json", &report)?;
    if config.svg {
        if let Some(first) = outcomes.first() {
            for (k, (px, b)) in first.pixels.iter().zip(&bounds).enumerate() {
                let Some((inner, Some(outer))) = b else { continue };
                let (lo, hi) = outer.bounds();
                let mut c = SvgCanvas::new(lo, hi, 600.0);
                let loops = crate::glauber::DropletSnapshot { time: times[k], scale: config.size as f64, pixels: px.clone() }
                    .boundary_loops();
                for lp in loops {
                    c.polygon(&lp, "black", "#dddddd");
                }
                c.polygon(outer.vertices(), color(0), "none");
                if let Some(p) = inner {
                    c.polygon(p.vertices(), color(1), "none");
                }
                out.write_text(&format!("compare_seed{}_t{k}.svg", seeds[0]), &c.finish())?;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn square_poly(x0: f64, x1: f64) -> ConvexPolygon {
        ConvexPolygon::from_ccw(vec![[x0, x0], [x1, x0], [x1, x1], [x0, x1]])
    }

    #[test]
    fn exact_square_is_sandwiched_by_itself() {
        // cells 0..4 at scale 4 make the unit square [0,1]^2
        let a = PixelSet::rasterize(&Rect { min: [0.0, 0.0], max: [1.0, 1.0] }, 4.0);
        assert_eq!(a.count(), 16);
        let p = square_poly(0.0, 1.0);
        let inc = inclusion_test(&a, Some(&p), Some(&p));
        assert!(inc.outer && inc.inner, "{inc:?}");
        assert_eq!(inc.excess, 0.0);
        assert_eq!(inc.deficit, 0.0);
    }

    #[test]
    fn failures_have_positive_distances() {
        let a = PixelSet::rasterize(&Rect { min: [0.0, 0.0], max: [1.0, 1.0] }, 4.0);
        let small = square_poly(0.1, 0.9);
        let inc = inclusion_test(&a, None, Some(&small));
        assert!(!inc.outer && inc.excess > 0.09, "{inc:?}");
        let big = square_poly(-0.1, 1.1);
        let inc = inclusion_test(&a, Some(&big), None);
        assert!(!inc.inner && inc.deficit > 0.09, "{inc:?}");
        // a hole inside the inner set is found by the witness points
        let mut holed = a.clone();
        holed.set(1, 1, false);
        let inc = inclusion_test(&holed, Some(&square_poly(0.1, 0.9)), None);
        assert!(!inc.inner && inc.deficit > 0.0, "{inc:?}");
    }

    #[test]
    fn empty_sets() {
        let e = PixelSet::from_cells(Vec::new(), 4.0);
        let p = square_poly(0.0, 1.0);
        let inc = inclusion_test(&e, None, Some(&p));
        assert!(inc.outer && inc.inner);
        let inc = inclusion_test(&e, Some(&p), None);
        assert!(inc.outer && !inc.inner);
        let a = PixelSet::rasterize(&Rect { min: [0.0, 0.0], max: [1.0, 1.0] }, 4.0);
        let inc = inclusion_test(&a, None, None);
        assert!(!inc.outer && inc.excess.is_infinite());
    }

    #[test]
    fn initial_time_holds_within_two_lattice_spacings() {
        let l = 64.0;
        let shape = crate::shape::InvariantShape::standard();
        let a = PixelSet::rasterize(&shape, l);
        let p = shape.polygon();
        let s_in = 1.0 - 2.0 / l / shape.inradius();
        let inc = inclusion_test(&a, Some(&p.scaled(s_in)), Some(&p.offset(2.0 / l, 256).unwrap()));
        assert!(inc.outer && inc.inner, "{inc:?}");
    }

    proptest::proptest! {
        #[test]
        fn verdicts_monotone_in_delta(seed in 0u64..200, d in 0.0f64..0.2, dd in 0.0f64..0.2) {
            use rand::Rng;
            let mut rng = crate::rng::rng_from_seed(seed);
            let cells: Vec<(i64, i64)> = (0..40).map(|_| (rng.gen_range(0..8), rng.gen_range(0..8))).collect();
            let a = PixelSet::from_cells(cells, 8.0);
            let base = square_poly(0.25, 0.75);
            let check = |delta: f64| {
                let outer = base.offset(delta, 64);
                let inner = base.offset(-delta, 64);
                inclusion_test(&a, inner.as_ref(), outer.as_ref())
            };
            let (small, large) = (check(d), check(d + dd));
            proptest::prop_assert!(!small.outer || large.outer);
            proptest::prop_assert!(!small.inner || large.inner);
        }
    }
}
