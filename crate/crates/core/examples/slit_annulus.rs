//! Distances on the slit annulus `1 < |x| < 2` minus `{0} × (−2, −1)`: points
//! on either side of the cut are far apart.

use supnorm::{GridDomain, HamiltonianSpec, Metric, Shape, Vec2};

fn main() -> supnorm::Result<()> {
    let dom = GridDomain::build(Shape::slit_annulus(), 0.05, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let right = dom.nearest_node(Vec2::new(0.05, -1.5)).expect("inside");
    let left = dom.nearest_node(Vec2::new(-0.05, -1.5)).expect("inside");
    let d = metric.pairwise_distance(1.0, right, left)?;
    let chord = (dom.position(right) - dom.position(left)).norm();
    println!("{} nodes, {} boundary nodes", dom.inside.iter().filter(|&&b| b).count(), dom.boundary_nodes.len());
    println!("across the slit: chord {chord:.3}, d_1 = {d:.4}");
    let path = metric.from_node(1.0, right).extract_geodesic(left)?;
    let top = path.iter().map(|&n| dom.position(n).y).fold(f64::NEG_INFINITY, f64::max);
    println!("geodesic: {} nodes, reaching y = {top:.3}", path.len());
    Ok(())
}
