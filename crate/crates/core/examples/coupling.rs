//! Runs a droplet and a larger droplet on the same clocks and coins and
//! checks that the smaller one stays inside the larger at every sample.

use isingflow::geometry::{Disk, Rect};
use isingflow::glauber::{couple, SpinConfiguration, Variant};

fn main() {
    let scale = 40.0;
    let inner = SpinConfiguration::rasterize(&Disk { center: [0.0, 0.0], radius: 0.5 }, scale);
    let outer = SpinConfiguration::rasterize(&Rect { min: [-0.6, -0.6], max: [0.6, 0.6] }, scale);
    assert!(outer.contains_config(&inner));

    let times: Vec<f64> = (1..=8).map(|k| 50.0 * k as f64).collect();
    let runs = couple(&[outer, inner], Variant::Standard, 3, &times).expect("valid configurations");
    for ((t, big), (_, small)) in runs[0].iter().zip(&runs[1]) {
        println!(
            "t = {t:5.0}: outer {:5} sites, inner {:5} sites, ordered: {}",
            big.minus_count(),
            small.minus_count(),
            big.contains_config(small)
        );
    }
}
