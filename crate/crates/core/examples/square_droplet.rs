//! Shrinks a square droplet of side L under zero-temperature Glauber
//! dynamics and compares the disappearance time with L^2 / 2.
//!
//!     cargo run --release --example square_droplet -- 64 10

use isingflow::glauber::{Glauber, SpinConfiguration};

fn main() {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().map_or(64, |s| s.parse().expect("side length"));
    let seeds: u64 = args.next().map_or(10, |s| s.parse().expect("seed count"));

    let mut total = 0.0;
    for seed in 0..seeds {
        let mut g = Glauber::new(SpinConfiguration::square((0, 0), side), seed);
        let tau = g.disappearance_time().expect("finite droplets disappear");
        println!("seed {seed:>3}: tau = {tau:9.1}  tau/L^2 = {:.4}", tau / (side * side) as f64);
        total += tau;
    }
    let mean = total / seeds as f64 / (side * side) as f64;
    println!("mean tau/L^2 = {mean:.4} (limit 0.5)");
}
