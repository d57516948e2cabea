//! Drives a harness command from a TOML config, the same path the
//! `isingflow` binary takes.

use isingflow::harness::{run, Command, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("isingflow-example");
    let config = ExperimentConfig::from_toml_str(&format!(
        "region = \"ellipse\"\nsemi_axes = [0.5, 0.3]\nflow_widths = [0.1, 0.05]\nsvg = true\nout = {:?}\n",
        dir.to_str().expect("utf-8 temp dir")
    ))?;
    let report = run(Command::Flow, &config)?;
    for c in &report.checks {
        println!("{} {}: {:.3e} (threshold {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    println!("outputs in {}", report.out_dir.display());
    Ok(())
}
