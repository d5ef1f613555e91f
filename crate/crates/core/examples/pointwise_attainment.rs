//! Pointwise representative `h_du` of a cone and its attainment set.

use supnorm::pointwise::{attainment_set, default_radii, pointwise_h};
use supnorm::{GridDomain, HamiltonianSpec, Metric, ScalarField, Shape};

fn main() -> supnorm::Result<()> {
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / 32.0, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    // Steeper to the right of x = 0.5.
    let u = ScalarField::from_fn(&dom, "u", |p| if p.x < 0.5 { 0.5 * p.x } else { 0.25 + 1.5 * (p.x - 0.5) });
    let radii = default_radii(&dom);
    let pw = pointwise_h(&metric, &u, &radii, 1e-9)?;
    let (sup, arg) = pw.sup();
    println!("sup h_du = {sup:.4} at {:?}", arg.map(|n| dom.ij(n)));
    println!("monotonicity defect over radii {radii:?}: {:.2e}", pw.monotonicity_defect());
    let set = attainment_set(&pw, 0.05 * sup);
    let xs: Vec<f64> = set.iter().map(|&n| dom.position(n).x).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    println!("attainment set: {} nodes, all with x ≥ {lo:.3}", set.len());
    Ok(())
}
