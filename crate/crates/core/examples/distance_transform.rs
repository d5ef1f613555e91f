//! Forward and reverse `d_λ` transforms from one node, and the geodesic back to
//! the source.

use supnorm::{GridDomain, HamiltonianSpec, Metric, Shape, Vec2};

fn main() -> supnorm::Result<()> {
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / 32.0, 16)?;
    // Gradients in y are penalised, so travel along y is cheap.
    let spec = HamiltonianSpec::anisotropic([[1.0, 0.0], [0.0, 9.0]])?;
    let metric = Metric::new(&spec, &dom);
    let src = dom.nearest_node(Vec2::new(0.2, 0.2)).expect("inside");
    let fwd = metric.from_node(1.0, src);
    let rev = metric.to_node(1.0, src);
    for p in [Vec2::new(0.8, 0.2), Vec2::new(0.2, 0.8), Vec2::new(0.8, 0.8)] {
        let n = dom.nearest_node(p).expect("inside");
        let path = fwd.extract_geodesic(n)?;
        println!(
            "to ({:.2}, {:.2}): d = {:.4}, back = {:.4}, geodesic has {} nodes",
            p.x,
            p.y,
            fwd.dist[n],
            rev.dist[n],
            path.len()
        );
    }
    Ok(())
}
