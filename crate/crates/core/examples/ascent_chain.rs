//! Up- and down-chains of maximal slope through the centre of the two-arc
//! absolute minimizer.

use supnorm::config::{two_arc, TWO_ARC_BAND, TWO_ARC_DECAY};
use supnorm::pointwise::{chain_check, ChainOptions};
use supnorm::solver::{absolutize, solve_mu, AbsolutizeOptions, SolverOptions};
use supnorm::{GridDomain, HamiltonianSpec, Metric, ScalarField, Shape, Vec2};

fn main() -> supnorm::Result<()> {
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / 32.0, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| two_arc(p, TWO_ARC_BAND, TWO_ARC_DECAY));
    let s = solve_mu(&metric, &g, &SolverOptions::default())?;
    let v0 = ScalarField::midpoint(&s.s_minus, &s.s_plus, "u0");
    let u = absolutize(&metric, &v0, &AbsolutizeOptions::default())?.field;

    let seed = dom.nearest_node(Vec2::new(0.5, 0.5)).expect("inside");
    let c = chain_check(&metric, &u, &[], seed, s.mu, &ChainOptions::default())?;
    for chain in [&c.down, &c.up] {
        let path: Vec<String> = chain
            .nodes
            .iter()
            .map(|&n| {
                let p = dom.position(n);
                format!("({:.3}, {:.3})", p.x, p.y)
            })
            .collect();
        println!("{:?}: {}", chain.direction, path.join(" → "));
    }
    println!(
        "chain cost {:.5}, d_μ(x₋, x₊) {:.5}, rise {:.5}, max slope defect {:.1e}",
        c.chain_cost, c.endpoint_distance, c.endpoint_rise, c.max_slope_defect
    );
    Ok(())
}
