//! Experiment drivers behind the `isingflow` command-line tool.
//!
//! Every command takes an [`ExperimentConfig`], writes its artifacts into
//! `config.out`, and returns a [`Report`]: a list of named checks with the
//! measured value, the threshold and a verdict. Outputs other than
//! `timing.json` depend only on the config and the seeds.

mod compare;
mod config;
mod flow_cmd;
mod shape_cmd;
mod simulate;
mod svg;
mod verify;

pub use compare::{cmd_compare, inclusion_test, ComparisonReport, Inclusion, Regime, Verdict};
pub use config::{
    read_support_csv, CompareMode, Droplet, ExperimentConfig, Mobility, Overrides, Profile, RegionKind,
};
pub use flow_cmd::{cmd_flow, FlowSummary};
pub use shape_cmd::cmd_shape;
pub use simulate::{cmd_simulate, TauStats};
pub use svg::SvgCanvas;
pub use verify::{cmd_ssep_verify, cmd_zr_verify, wilson_interval};

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::flow::FlowError;
use crate::geometry::GeometryError;
use crate::glauber::GlauberError;
use crate::interface::InterfaceError;
use crate::pde::PdeError;
use crate::shape::ShapeError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}: {1}")]
    Csv(String, csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("initial droplet is not strictly convex: {0}")]
    NonConvex(String),
    #[error("region mismatch: flow run used {flow}, this run uses {current}")]
    RegionMismatch { flow: String, current: String },
    #[error("flow run in {dir} has no state at t = {time}")]
    MissingFlowTime { dir: String, time: f64 },
    #[error(transparent)]
    Glauber(#[from] GlauberError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }
}

/// One tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, passed: value <= threshold }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, passed: value >= threshold }
    }

    /// A yes/no condition, recorded as 1/0 against threshold 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, threshold: 1.0, passed: ok }
    }
}

/// Result of a command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub out_dir: PathBuf,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Flow,
    Compare,
    SsepVerify,
    ZrVerify,
    Shape,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Flow => "flow",
            Command::Compare => "compare",
            Command::SsepVerify => "ssep-verify",
            Command::ZrVerify => "zr-verify",
            Command::Shape => "shape",
        }
    }
}

/// Validates the config, runs the command, and writes `metadata.json`,
/// `checks.json` and `timing.json` next to the command's own outputs.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<Report, HarnessError> {
    config.validate()?;
    let out = OutDir::create(&config.out)?;
    out.write_json("metadata.json", &Metadata::new(command, config))?;
    let start = Instant::now();
    let checks = match command {
        Command::Simulate => cmd_simulate(config, &out)?,
        Command::Flow => cmd_flow(config, &out)?,
        Command::Compare => cmd_compare(config, &out)?.checks,
        Command::SsepVerify => cmd_ssep_verify(config, &out)?,
        Command::ZrVerify => cmd_zr_verify(config, &out)?,
        Command::Shape => cmd_shape(config, &out)?,
    };
    let report = Report { command: command.name().to_string(), checks, out_dir: config.out.clone() };
    out.write_json("checks.json", &report)?;
    out.write_json("timing.json", &serde_json::json!({ "wall_seconds": start.elapsed().as_secs_f64() }))?;
    Ok(report)
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    command: &'static str,
    version: &'static str,
    generator: &'static str,
    config: &'a ExperimentConfig,
}

impl<'a> Metadata<'a> {
    fn new(command: Command, config: &'a ExperimentConfig) -> Self {
        Metadata {
            command: command.name(),
            version: env!("CARGO_PKG_VERSION"),
            generator: crate::rng::GENERATOR_NAME,
            config,
        }
    }
}

/// A run directory. All writes of a command go through one value, so files
/// are written sequentially even when the work itself runs in parallel.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn subdir(&self, name: &str) -> Result<OutDir, HarnessError> {
        OutDir::create(&self.root.join(name))
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), HarnessError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), HarnessError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| HarnessError::io(&p, e))
    }

    /// Writes a CSV file with the given header and serialisable rows.
    pub fn write_csv<R: Serialize>(&self, name: &str, header: &[&str], rows: &[R]) -> Result<(), HarnessError> {
        let p = self.path(name);
        let err = |e| HarnessError::Csv(p.display().to_string(), e);
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&p).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.serialize(r).map_err(err)?;
        }
        w.flush().map_err(|e| HarnessError::io(&p, e))
    }

    /// Opens a file for a writer that streams its own format.
    pub fn create_file(&self, name: &str) -> Result<std::io::BufWriter<fs::File>, HarnessError> {
        let p = self.path(name);
        fs::File::create(&p).map(std::io::BufWriter::new).map_err(|e| HarnessError::io(&p, e))
    }
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub(crate) fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}
