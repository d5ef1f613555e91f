//! Optimal value `μ`, extremal minimizers `S^±` and the absolute-minimizer
//! iterate for the two-arc boundary data on the unit square.

use supnorm::config::{two_arc, TWO_ARC_BAND, TWO_ARC_DECAY};
use supnorm::solver::{absolutize, solve_mu, AbsolutizeOptions, SolverOptions};
use supnorm::{GridDomain, HamiltonianSpec, Metric, ScalarField, Shape, Vec2};

fn main() -> supnorm::Result<()> {
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / 32.0, 16)?;
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| two_arc(p, TWO_ARC_BAND, TWO_ARC_DECAY));

    let s = solve_mu(&metric, &g, &SolverOptions::default())?;
    println!("μ = {:.6} after {} probes, bracket {:?}", s.mu, s.bisection_trace.len(), s.bracket);
    println!("max |S^+ − S^-| = {:.4}", s.s_plus.max_abs_diff(&s.s_minus, &dom));

    let v0 = ScalarField::midpoint(&s.s_minus, &s.s_plus, "u0");
    let abs = absolutize(&metric, &v0, &AbsolutizeOptions::default())?;
    println!("absolutize: {} sweeps, converged = {}", abs.sweeps, abs.converged);
    for p in [Vec2::new(0.25, 0.5), Vec2::new(0.5, 0.5), Vec2::new(0.75, 0.5)] {
        let n = dom.nearest_node(p).expect("inside");
        println!(
            "  ({:.2}, {:.2}): S^- {:.4}  u_abs {:.4}  S^+ {:.4}",
            p.x, p.y, s.s_minus.values[n], abs.field.values[n], s.s_plus.values[n]
        );
    }
    Ok(())
}
