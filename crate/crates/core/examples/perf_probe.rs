//! Timing probe for the relaxation LP at schedule-tail sizes.

use bvrelax_core::integrand::Integrand;
use bvrelax_core::rational::{rat, rat_int};
use bvrelax_core::relax::{relax_value, RelaxTarget};
use bvrelax_core::space::WeightedIntervalSpace;
use bvrelax_core::GridFunction;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(16384);
    let pieces_count: i64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(511);

    // alternating-weight space resembling the level-8 Cantor structure
    let mut pieces = Vec::new();
    for i in 0..pieces_count {
        let w = if i % 2 == 0 { rat_int(2) } else { rat_int(1) };
        pieces.push((rat(i, pieces_count), rat(i + 1, pieces_count), w));
    }
    let space = WeightedIntervalSpace::new(pieces).unwrap();

    // ramp target with oscillating slopes on the piece grid
    let nodes: Vec<_> = (0..=pieces_count).map(|i| rat(i, pieces_count)).collect();
    let values: Vec<f64> = (0..=pieces_count)
        .map(|i| i as f64 / pieces_count as f64 + 0.05 * ((i % 3) as f64))
        .collect();
    let target = RelaxTarget::from_grid(GridFunction::new(nodes, values).unwrap());
    let f = Integrand::two_slope_example();
    let omega = space.interior();

    let t0 = Instant::now();
    let res = relax_value(&f, &target, &space, &omega, n, 1.0 / 64.0).unwrap();
    println!(
        "n={} cells -> value {:.6}, lower {:.6}, {:?}",
        n,
        res.value,
        res.lower_certificate,
        t0.elapsed()
    );
}
