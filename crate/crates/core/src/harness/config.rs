use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::flow::{AnisotropyTable, Offset, SupportFunction};
use crate::geometry::{ConvexPolygon, Disk, Ellipse, Point, Rect, Region};
use crate::glauber::{Connectivity, Variant};
use crate::rng::seed_list;
use crate::shape::InvariantShape;

/// Named initial droplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// `[-side/2, side/2]^2`.
    Square,
    /// Disk of radius `radius` centred at the origin.
    Disk,
    /// Axis-aligned ellipse with semi-axes `semi_axes`.
    Ellipse,
    /// The self-similar droplet.
    #[default]
    Invariant,
    /// Support function read from `support_file`.
    SupportFile,
}

/// Initial height profile for the interface experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `min(x, 1 - x)` on `[0, 1]`; `1 - |u|` on `[-1, 1]`.
    Tent,
    /// `cos(pi u / 2)` on `[-1, 1]`; `sin(pi x) / pi` on `[0, 1]`.
    Cosine,
    /// Identically zero.
    Flat,
    /// `1 - u^2` on `[-1, 1]`; `x (1 - x)` on `[0, 1]`.
    Parabola,
}

impl Profile {
    /// Profile on `[0, 1]` vanishing at 0, for the corner-flip dynamics.
    pub fn unit_interval(self) -> fn(f64) -> f64 {
        match self {
            Profile::Tent => |x| x.min(1.0 - x),
            Profile::Cosine => |x| (PI * x).sin() / PI,
            Profile::Flat => |_| 0.0,
            Profile::Parabola => |x| x * (1.0 - x),
        }
    }

    /// Profile on `[-1, 1]` vanishing at both ends, for the zero-range
    /// dynamics.
    pub fn symmetric(self) -> fn(f64) -> f64 {
        match self {
            Profile::Tent => |u| 1.0 - u.abs(),
            Profile::Cosine => |u| (PI * u / 2.0).cos(),
            Profile::Flat => |_| 0.0,
            Profile::Parabola => |u| 1.0 - u * u,
        }
    }

    /// `sup |phi'|` of [`Profile::symmetric`].
    pub fn symmetric_max_slope(self) -> f64 {
        match self {
            Profile::Tent => 1.0,
            Profile::Cosine => PI / 2.0,
            Profile::Flat => 0.0,
            Profile::Parabola => 2.0,
        }
    }
}

/// Mobility used by the deterministic flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mobility {
    /// `1 / (2 (|cos| + |sin|)^2)`, Gaussian-smoothed at each width.
    #[default]
    Ising,
    /// `a = 1` (ordinary curve-shortening flow).
    Isotropic,
}

/// How `compare` builds the deterministic sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Scaling for the invariant droplet, flow otherwise.
    #[default]
    Auto,
    /// `(sqrt(1 - 2 alpha t) -+ delta) D`; invariant droplet only.
    Scaling,
    /// `D(t)` from the flow, dilated and eroded by `delta`.
    Flow,
}

/// Every tunable of every command. Config files are flat TOML with these
/// keys; command-line flags override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Lattice scale `L`.
    pub size: i64,
    /// Scales for the interface L-sweeps.
    pub sizes: Vec<i64>,
    pub seeds: usize,
    pub seed_base: u64,
    /// Explicit seeds; overrides `seeds` / `seed_base` when non-empty.
    pub seed_list: Vec<u64>,
    pub delta: f64,
    /// Macroscopic sample times (the harness multiplies by `L^2`). Empty
    /// means the command default.
    pub times: Vec<f64>,
    pub variant: Variant,
    pub connectivity: Connectivity,
    pub region: RegionKind,
    pub side: f64,
    pub radius: f64,
    pub semi_axes: [f64; 2],
    pub support_file: Option<PathBuf>,
    pub profile: Option<Profile>,
    /// Macroscopic time for the interface checks.
    pub time: Option<f64>,
    /// Sup-norm tolerance for the interface checks.
    pub tolerance: f64,
    /// Allowed relative deviation of the mean disappearance time from
    /// `L^2 Area / 2`.
    pub tau_tolerance: f64,
    /// Fraction of ensemble members that must pass.
    pub pass_rate: f64,
    /// Slack in the zero-range sandwich between two heat flows.
    pub sandwich_eps: f64,
    pub mobility: Mobility,
    /// Angular grid size of the flow (multiple of 4).
    pub flow_points: usize,
    /// Smoothing widths of the anisotropy.
    pub flow_widths: Vec<f64>,
    /// Local error tolerance of the nonlinear lattice solver.
    pub ode_tolerance: f64,
    /// Snapshots per simulation when `times` is empty.
    pub snapshots: usize,
    pub svg: bool,
    pub check_ode: bool,
    pub compare_mode: CompareMode,
    /// Output directory of an earlier `flow` run to reuse in `compare`.
    pub flow_dir: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            size: 128,
            sizes: vec![64, 128, 256],
            seeds: 20,
            seed_base: 0,
            seed_list: Vec::new(),
            delta: 0.08,
            times: Vec::new(),
            variant: Variant::Standard,
            connectivity: Connectivity::Four,
            region: RegionKind::Invariant,
            side: 1.0,
            radius: 1.0,
            semi_axes: [2.0, 1.0],
            support_file: None,
            profile: None,
            time: None,
            tolerance: 0.05,
            tau_tolerance: 0.1,
            pass_rate: 0.9,
            sandwich_eps: 0.03,
            mobility: Mobility::Ising,
            flow_points: 512,
            flow_widths: vec![0.1, 0.05],
            ode_tolerance: 1e-9,
            snapshots: 20,
            svg: false,
            check_ode: false,
            compare_mode: CompareMode::Auto,
            flow_dir: None,
            out: PathBuf::from("runs"),
        }
    }
}

/// Command-line overrides; `None` keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub size: Option<i64>,
    pub seeds: Option<usize>,
    pub seed_base: Option<u64>,
    pub delta: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub variant: Option<Variant>,
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub check_ode: bool,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.size {
            self.size = v;
        }
        if let Some(v) = o.seeds {
            self.seeds = v;
            self.seed_list.clear();
        }
        if let Some(v) = o.seed_base {
            self.seed_base = v;
            self.seed_list.clear();
        }
        if let Some(v) = o.delta {
            self.delta = v;
        }
        if let Some(v) = &o.times {
            self.times = v.clone();
        }
        if let Some(v) = o.variant {
            self.variant = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        self.svg |= o.svg;
        self.check_ode |= o.check_ode;
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.size < 1 || self.sizes.iter().any(|&l| l < 1) {
            return bad("sizes must be positive");
        }
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if self.times.iter().any(|&t| !(t >= 0.0)) || self.time.is_some_and(|t| !(t >= 0.0)) {
            return bad("times must be non-negative");
        }
        let seeds = self.seed_values();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return bad("seeds must be distinct");
        }
        if self.flow_points < 8 || !self.flow_points.is_multiple_of(4) {
            return bad("flow_points must be a multiple of 4, at least 8");
        }
        if self.flow_widths.iter().any(|&w| !(w > 0.0)) {
            return bad("flow widths must be positive");
        }
        if self.region == RegionKind::SupportFile && self.support_file.is_none() {
            return bad("region = \"support_file\" needs support_file");
        }
        Ok(())
    }

    pub fn seed_values(&self) -> Vec<u64> {
        if self.seed_list.is_empty() {
            seed_list(self.seed_base, self.seeds)
        } else {
            self.seed_list.clone()
        }
    }

    /// Resolves the region keys into a droplet.
    pub fn droplet(&self) -> Result<Droplet, HarnessError> {
        Ok(match self.region {
            RegionKind::Square => Droplet::Square(Rect::centered_square(self.side / 2.0)),
            RegionKind::Disk => Droplet::Disk(Disk { center: [0.0, 0.0], radius: self.radius }),
            RegionKind::Ellipse => {
                Droplet::Ellipse(Ellipse { center: [0.0, 0.0], a: self.semi_axes[0], b: self.semi_axes[1] })
            }
            RegionKind::Invariant => Droplet::Invariant(Box::new(InvariantShape::standard())),
            RegionKind::SupportFile => {
                let path = self.support_file.as_deref().expect("validated");
                let h = read_support_csv(path)?;
                let poly = h.polygon().ok_or_else(|| HarnessError::NonConvex(path.display().to_string()))?;
                Droplet::Support(h, poly)
            }
        })
    }

    /// A short string identifying the region, compared between runs.
    pub fn region_descriptor(&self) -> String {
        match self.region {
            RegionKind::Square => format!("square side={}", self.side),
            RegionKind::Disk => format!("disk radius={}", self.radius),
            RegionKind::Ellipse => format!("ellipse semi_axes={}x{}", self.semi_axes[0], self.semi_axes[1]),
            RegionKind::Invariant => "invariant".to_string(),
            RegionKind::SupportFile => {
                format!("support_file {}", self.support_file.as_deref().unwrap_or(Path::new("")).display())
            }
        }
    }

    /// Mobility table for smoothing width `w`. The Ising mobility uses pure
    /// Gaussian smoothing, which keeps its integral at 2.
    pub fn mobility_table(&self, w: f64) -> AnisotropyTable {
        match self.mobility {
            Mobility::Ising => AnisotropyTable::new(self.flow_points, w, Offset::None),
            Mobility::Isotropic => AnisotropyTable::constant(self.flow_points, 1.0),
        }
    }

    /// `int a dtheta` of the configured mobility before smoothing.
    pub fn mobility_integral(&self) -> f64 {
        match self.mobility {
            Mobility::Ising => 2.0,
            Mobility::Isotropic => 2.0 * PI,
        }
    }
}

/// An initial droplet in macroscopic units.
#[derive(Debug, Clone)]
pub enum Droplet {
    Square(Rect),
    Disk(Disk),
    Ellipse(Ellipse),
    Invariant(Box<InvariantShape>),
    Support(SupportFunction, ConvexPolygon),
}

impl Droplet {
    pub fn region(&self) -> &dyn Region {
        match self {
            Droplet::Square(r) => r,
            Droplet::Disk(d) => d,
            Droplet::Ellipse(e) => e,
            Droplet::Invariant(s) => s.as_ref(),
            Droplet::Support(_, p) => p,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Droplet::Square(r) => (r.max[0] - r.min[0]) * (r.max[1] - r.min[1]),
            Droplet::Disk(d) => PI * d.radius * d.radius,
            Droplet::Ellipse(e) => PI * e.a * e.b,
            Droplet::Invariant(s) => s.area(),
            Droplet::Support(h, _) => h.area(),
        }
    }

    /// Support function on `n` angles.
    pub fn support(&self, n: usize) -> SupportFunction {
        match self {
            Droplet::Square(r) => SupportFunction::of_polygon(n, &rect_polygon(r)),
            Droplet::Disk(d) => SupportFunction::circle(n, d.radius, d.center),
            Droplet::Ellipse(e) => SupportFunction::ellipse(n, e.a, e.b),
            Droplet::Invariant(s) => SupportFunction::new(s.support_table(n)),
            Droplet::Support(h, _) => {
                if h.len() == n {
                    h.clone()
                } else {
                    let p = h.polygon().expect("checked at load time");
                    SupportFunction::of_polygon(n, &p)
                }
            }
        }
    }

    /// Boundary polygon for drawing and inclusion tests.
    pub fn polygon(&self) -> ConvexPolygon {
        match self {
            Droplet::Square(r) => rect_polygon(r),
            Droplet::Disk(d) => ellipse_polygon(d.center, d.radius, d.radius, 4096),
            Droplet::Ellipse(e) => ellipse_polygon(e.center, e.a, e.b, 4096),
            Droplet::Invariant(s) => s.polygon(),
            Droplet::Support(_, p) => p.clone(),
        }
    }
}

fn rect_polygon(r: &Rect) -> ConvexPolygon {
    ConvexPolygon::from_ccw(vec![r.min, [r.max[0], r.min[1]], r.max, [r.min[0], r.max[1]]])
}

fn ellipse_polygon(c: Point, a: f64, b: f64, n: usize) -> ConvexPolygon {
    ConvexPolygon::from_ccw(
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                [c[0] + a * t.cos(), c[1] + b * t.sin()]
            })
            .collect(),
    )
}

/// Reads a support function from CSV with header `theta,h`, rows at the
/// uniform angles `2 pi j / n`.
pub fn read_support_csv(path: &Path) -> Result<SupportFunction, HarnessError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| HarnessError::Csv(path.display().to_string(), e))?;
    let mut h = Vec::new();
    for row in rdr.deserialize::<(f64, f64)>() {
        let (_, v) = row.map_err(|e| HarnessError::Csv(path.display().to_string(), e))?;
        h.push(v);
    }
    if h.len() < 8 || h.len() % 4 != 0 {
        return Err(HarnessError::Config(format!(
            "{}: need a multiple of 4 (at least 8) support values, got {}",
            path.display(),
            h.len()
        )));
    }
    let s = SupportFunction::new(h);
    if s.curvature().is_err() {
        return Err(HarnessError::NonConvex(path.display().to_string()));
    }
    Ok(s)
}
