use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use isingflow::glauber::Variant;
use isingflow::harness::{run, Command, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "isingflow", version, about = "Zero-temperature Ising droplets and their deterministic limits")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the Glauber dynamics and record snapshots and disappearance times.
    Simulate(Common),
    /// Run the anisotropic curve-shortening flow of the initial droplet.
    Flow(Common),
    /// Test the stochastic droplet against the deterministic sandwich.
    Compare(Common),
    /// Corner-flip dynamics against the heat equation.
    SsepVerify(Common),
    /// Zero-range height dynamics against the nonlinear lattice system.
    ZrVerify(Common),
    /// Solve for the self-similar droplet and check its identities.
    Shape(Common),
}

#[derive(Args)]
struct Common {
    /// Flat TOML file with any `ExperimentConfig` keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lattice scale L.
    #[arg(long = "size")]
    size: Option<i64>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long = "seed-base")]
    seed_base: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated macroscopic times.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// standard, connectivity_preserving or eager_flip.
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
    #[arg(long = "check-ode")]
    check_ode: bool,
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides {
        size: common.size,
        seeds: common.seeds,
        seed_base: common.seed_base,
        delta: common.delta,
        times: common.times.clone(),
        variant: common.variant,
        out: common.out.clone(),
        svg: common.svg,
        check_ode: common.check_ode,
    });
    Ok(config)
}

fn execute(cli: Cli) -> Result<bool> {
    let (command, common) = match &cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Flow(c) => (Command::Flow, c),
        Cmd::Compare(c) => (Command::Compare, c),
        Cmd::SsepVerify(c) => (Command::SsepVerify, c),
        Cmd::ZrVerify(c) => (Command::ZrVerify, c),
        Cmd::Shape(c) => (Command::Shape, c),
    };
    let config = load(common)?;
    let report = run(command, &config).with_context(|| format!("{} failed", command.name()))?;
    for c in &report.checks {
        println!("{} {}: {:.6e} (threshold {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    println!("outputs in {}", report.out_dir.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
