//! The droplet that shrinks by homothety under the Ising mobility, and the
//! same droplet run through the flow.

use isingflow::flow::{flow_run, AnisotropyTable, FlowOptions, Offset, SupportFunction};
use isingflow::shape::InvariantShape;

fn main() {
    let shape = InvariantShape::standard();
    println!("alpha = {:.15}", shape.alpha);
    println!("area = {:.6}, 1/alpha = {:.6}", shape.area(), 1.0 / shape.alpha);
    println!("extinction time = {:.6}", shape.extinction_time());
    for deg in [0.0f64, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
        let th = deg.to_radians();
        println!("  normal {deg:4.0} deg: support {:.5}, curvature {:.5}", shape.support(th), shape.curvature(th));
    }

    let n = 512;
    let h0 = SupportFunction::new(shape.support_table(n));
    let a = AnisotropyTable::new(n, 0.05, Offset::None);
    let tf = shape.extinction_time();
    let t = 0.5 * tf;
    let run = flow_run(&h0, &a, t, &FlowOptions::default()).expect("smooth convex data");
    let expected = h0.scaled((1.0 - t / tf).sqrt());
    let err = run
        .last()
        .support
        .values()
        .iter()
        .zip(expected.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / expected.max();
    println!("after half the lifetime the flow matches the rescaled droplet to {err:.2e}");
}
