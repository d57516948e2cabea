//! Runs the Glauber dynamics from the self-similar droplet and checks, at a
//! few times, that the droplet lies between the inner and outer offsets of
//! the rescaled deterministic shape.
//!
//!     cargo run --release --example stochastic_sandwich -- 128

use isingflow::glauber::{Glauber, SpinConfiguration};
use isingflow::harness::inclusion_test;
use isingflow::shape::InvariantShape;

fn main() {
    let scale: f64 = std::env::args().nth(1).map_or(128.0, |s| s.parse().expect("lattice scale"));
    let delta = 0.08;
    let shape = InvariantShape::standard();
    let poly = shape.polygon();
    let tf = shape.extinction_time();

    let mut g = Glauber::new(SpinConfiguration::rasterize(&poly, scale), 1);
    for frac in [0.2, 0.5, 0.8] {
        let t = frac * tf;
        g.step_to(t * scale * scale).expect("forward in time");
        let snap = g.snapshot(scale);
        let r = (1.0 - t / tf).sqrt();
        let outer = poly.scaled(r).offset(delta, 256);
        let inner = poly.scaled(r).offset(-delta, 256);
        let inc = inclusion_test(&snap.pixels, inner.as_ref(), outer.as_ref());
        println!(
            "t = {t:.3}: {} sites, inside outer: {}, covers inner: {}",
            snap.pixels.count(),
            inc.outer,
            inc.inner
        );
    }
}
