//! A Hamiltonian with a flat shelf: `u = 0.6·x` has slope below the shelf
//! level, yet it cannot be compared with cones of `d_{1/2}` and chains stall.

use supnorm::pointwise::{ascent_chain, ChainDirection, ChainOptions};
use supnorm::{Error, GridDomain, HamiltonianSpec, Metric, ScalarField, Shape, Vec2};

fn main() -> supnorm::Result<()> {
    let spec = HamiltonianSpec::plateau(0.5, 0.75)?;
    println!("L_1/2(e₁) = {:.4}", spec.conjugate(Vec2::ZERO, Vec2::new(1.0, 0.0), 0.5));

    let shape = Shape::Box {
        lo: Vec2::new(-1.5, -1.5),
        hi: Vec2::new(1.5, 1.5),
    };
    let dom = GridDomain::build(shape, 1.0 / 16.0, 16)?;
    let metric = Metric::new(&spec, &dom);
    let origin = dom.nearest_node(Vec2::ZERO).expect("inside");
    let u = ScalarField::from_fn(&dom, "u", |p| 0.6 * p.x);
    let d = metric.from_node(0.5, origin);
    let worst = dom
        .inside_nodes()
        .filter(|&n| (dom.position(n).norm() - 1.0).abs() <= 0.5 * dom.h)
        .map(|n| u.values[n] - d.dist[n])
        .fold(f64::NEG_INFINITY, f64::max);
    println!("max over |y| = 1 of u(y) − d_1/2(0, y) = {worst:.4}");

    match ascent_chain(&metric, &u, origin, 0.5, ChainDirection::Up, &ChainOptions::default()) {
        Err(e @ Error::ChainStall { .. }) => println!("as expected: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
