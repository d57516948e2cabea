use rayon::prelude::*;
use serde::Serialize;

use super::svg::{color, SvgCanvas};
use super::{mean_sd, Check, ExperimentConfig, HarnessError, OutDir};
use crate::glauber::{DropletSnapshot, Glauber, SpinConfiguration};

/// Disappearance-time statistics over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauStats {
    pub size: i64,
    pub area: f64,
    pub samples: Vec<f64>,
    /// Mean of `tau / L^2`.
    pub mean_over_l2: f64,
    /// Mean of `tau / (L^2 Area / 2)`.
    pub mean_ratio: f64,
    pub sd: f64,
    /// `sd / L^(3/2)`: the empirical fluctuation window on that scale.
    pub sd_over_l15: f64,
}

impl TauStats {
    pub fn new(size: i64, area: f64, samples: Vec<f64>) -> Self {
        let l2 = (size * size) as f64;
        let (m, sd) = mean_sd(&samples);
        TauStats {
            size,
            area,
            mean_over_l2: m / l2,
            mean_ratio: m / (l2 * area / 2.0),
            sd,
            sd_over_l15: sd / (size as f64).powf(1.5),
            samples,
        }
    }
}

/// Snapshot times in `(0, Area/2]` unless the config lists them.
pub(crate) fn snapshot_times(config: &ExperimentConfig, area: f64) -> Vec<f64> {
    if !config.times.is_empty() {
        let mut t = config.times.clone();
        t.sort_by(f64::total_cmp);
        return t;
    }
    let n = config.snapshots.max(1);
    (1..=n).map(|k| 0.5 * area * k as f64 / n as f64).collect()
}

struct SeedRun {
    seed: u64,
    tau: f64,
    snapshots: Vec<DropletSnapshot>,
}

fn run_seed(config: &ExperimentConfig, initial: &SpinConfiguration, times: &[f64], seed: u64) -> Result<SeedRun, HarnessError> {
    let l2 = (config.size * config.size) as f64;
    let mut g = Glauber::with_options(initial.clone(), config.variant, config.connectivity, seed);
    let mut snapshots = Vec::new();
    if !initial.is_empty() {
        for &t in times {
            g.step_to(t * l2)?;
            snapshots.push(g.snapshot(config.size as f64));
        }
    }
    let tau = g.disappearance_time()?;
    Ok(SeedRun { seed, tau, snapshots })
}

/// Runs the dynamics from the rasterized droplet for every seed, writes the
/// snapshots (run-length encoded) and the disappearance times, and checks
/// the mean disappearance time against `L^2 Area / 2`.
pub fn cmd_simulate(config: &ExperimentConfig, out: &OutDir) -> Result<Vec<Check>, HarnessError> {
    let droplet = config.droplet()?;
    let initial = SpinConfiguration::rasterize(droplet.region(), config.size as f64);
    let area = droplet.area();
    let times = snapshot_times(config, area);
    let seeds = config.seed_values();
    let runs: Vec<SeedRun> = seeds
        .par_iter()
        .map(|&s| run_seed(config, &initial, &times, s))
        .collect::<Result<_, _>>()?;

    let snaps = out.subdir("snapshots")?;
    for r in &runs {
        if r.snapshots.is_empty() {
            continue;
        }
        let mut rows = Vec::new();
        for s in &r.snapshots {
            rows.extend(s.runs().into_iter().map(|run| (s.time, run.row, run.start, run.len)));
        }
        snaps.write_csv(&format!("seed_{}.csv", r.seed), &["t", "row", "start", "len"], &rows)?;
        if config.svg {
            snaps.write_text(&format!("seed_{}.svg", r.seed), &snapshot_svg(&r.snapshots, config.size))?;
        }
    }
    let rows: Vec<(u64, f64, f64)> = runs.iter().map(|r| (r.seed, r.tau, r.tau / (config.size * config.size) as f64)).collect();
    out.write_csv("tau.csv", &["seed", "tau", "tau_over_l2"], &rows)?;

    let stats = TauStats::new(config.size, area, runs.iter().map(|r| r.tau).collect());
    out.write_json(
        "summary.json",
        &serde_json::json!({
            "region": config.region_descriptor(),
            "initial_sites": initial.minus_count(),
            "snapshot_times": times,
            "tau": stats,
        }),
    )?;
    let mut checks = Vec::new();
    if initial.is_empty() {
        checks.push(Check::holds("empty droplet has tau = 0", stats.samples.iter().all(|&t| t == 0.0)));
    } else {
        checks.push(Check::at_most(
            "tau / (L^2 Area / 2) - 1",
            (stats.mean_ratio - 1.0).abs(),
            config.tau_tolerance,
        ));
    }
    Ok(checks)
}

fn snapshot_svg(snaps: &[DropletSnapshot], size: i64) -> String {
    let first = &snaps[0].pixels;
    let s = size as f64;
    let lo = [first.origin().0 as f64 / s, first.origin().1 as f64 / s];
    let hi = [lo[0] + first.width() as f64 / s, lo[1] + first.height() as f64 / s];
    let mut c = SvgCanvas::new(lo, hi, 600.0);
    for (i, snap) in snaps.iter().enumerate() {
        for lp in snap.boundary_loops() {
            c.polygon(&lp, color(i), "none");
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RegionKind;

    #[test]
    fn default_snapshot_times() {
        let c = ExperimentConfig { snapshots: 4, ..Default::default() };
        assert_eq!(snapshot_times(&c, 1.0), vec![0.125, 0.25, 0.375, 0.5]);
        let c = ExperimentConfig { times: vec![0.3, 0.1], ..Default::default() };
        assert_eq!(snapshot_times(&c, 1.0), vec![0.1, 0.3]);
    }

    #[test]
    fn empty_region_has_no_snapshots() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig {
            region: RegionKind::Disk,
            radius: 1e-3,
            size: 16,
            seeds: 3,
            out: dir.path().to_path_buf(),
            ..Default::default()
        };
        let out = OutDir::create(dir.path()).unwrap();
        let checks = cmd_simulate(&c, &out).unwrap();
        assert!(checks.iter().all(|c| c.passed));
        assert_eq!(std::fs::read_dir(dir.path().join("snapshots")).unwrap().count(), 0);
        let tau = std::fs::read_to_string(dir.path().join("tau.csv")).unwrap();
        assert_eq!(tau.lines().count(), 4);
        assert!(tau.lines().skip(1).all(|l| l.split(',').nth(1) == Some("0.0")));
    }
}
