//! Invariants of `solve_mu` and `absolutize` on small fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supnorm::config::{two_arc, TWO_ARC_BAND, TWO_ARC_DECAY};
use supnorm::solver::{
    absolutize, local_optimality_residual, solve_mu, sup_h_of_field, AbsolutizeOptions, SolverOptions,
};
use supnorm::{GridDomain, HamiltonianSpec, Metric, ScalarField, Shape, WeightField};

fn fixtures() -> Vec<(&'static str, GridDomain, HamiltonianSpec, fn(supnorm::Vec2) -> f64)> {
    let b = || GridDomain::build(Shape::unit_box(), 1.0 / 24.0, 16).unwrap();
    vec![
        ("eikonal/linear", b(), HamiltonianSpec::eikonal(), |p| p.x),
        ("anisotropic/saddle", b(), HamiltonianSpec::anisotropic([[2.0, 0.5], [0.5, 1.0]]).unwrap(), |p| {
            p.x * p.x - p.y * p.y
        }),
        (
            "weighted/linear",
            b(),
            HamiltonianSpec::weighted(
                WeightField::Affine {
                    c0: 1.0,
                    cx: 0.5,
                    cy: 0.0,
                },
                supnorm::Vec2::ZERO,
                supnorm::Vec2::new(1.0, 1.0),
            )
            .unwrap(),
            |p| p.x + 0.3 * p.y,
        ),
        ("eikonal/two-arc", b(), HamiltonianSpec::eikonal(), |p| two_arc(p, TWO_ARC_BAND, TWO_ARC_DECAY)),
    ]
}

#[test]
fn bisection_trace_separates_infeasible_from_feasible() {
    for (name, dom, spec, g) in fixtures() {
        let metric = Metric::new(&spec, &dom);
        let g = ScalarField::from_fn(&dom, "g", g);
        let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
        let worst_infeasible = s.bisection_trace.iter().filter(|p| !p.feasible).map(|p| p.lambda).fold(0.0, f64::max);
        let best_feasible = s.bisection_trace.iter().filter(|p| p.feasible).map(|p| p.lambda).fold(f64::INFINITY, f64::min);
        assert!(worst_infeasible < best_feasible, "{name}: probes interleave");
        assert_eq!(s.bracket, (worst_infeasible, best_feasible), "{name}");
        assert!(s.mu == best_feasible);
        // Width is relative to the first feasible probe.
        let first = s.bisection_trace.iter().find(|p| p.feasible).unwrap().lambda;
        assert!(best_feasible - worst_infeasible <= 1e-4 * first + 1e-12, "{name}: bracket {:?}", s.bracket);
    }
}

#[test]
fn extremal_minimizers_share_the_boundary_and_are_ordered() {
    for (name, dom, spec, g) in fixtures() {
        let metric = Metric::new(&spec, &dom);
        let g = ScalarField::from_fn(&dom, "g", g);
        let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
        for &b in &dom.boundary_nodes {
            assert!((s.s_minus.values[b] - g.values[b]).abs() <= 1e-9, "{name}: S^- off g at {b}");
            assert!((s.s_plus.values[b] - g.values[b]).abs() <= 1e-9, "{name}: S^+ off g at {b}");
        }
        for n in dom.inside_nodes() {
            assert!(s.s_minus.values[n] <= s.s_plus.values[n] + 1e-12, "{name}: S^- > S^+ at {n}");
        }
        // Discrete gradients of d_μ cones exceed μ only by the stencil defect.
        for f in [&s.s_minus, &s.s_plus] {
            let (sup, _) = sup_h_of_field(&spec, &dom, f).unwrap();
            assert!(sup <= s.mu * 1.1 + 4.0 * dom.h, "{name}: sup H(∇ {}) = {sup}, μ = {}", f.name, s.mu);
        }
    }
}

#[test]
fn minimizers_are_lipschitz_for_d_mu() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, dom, spec, g) in fixtures() {
        let metric = Metric::new(&spec, &dom);
        let g = ScalarField::from_fn(&dom, "g", g);
        let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
        let v0 = ScalarField::midpoint(&s.s_minus, &s.s_plus, "u0");
        let abs = absolutize(&metric, &v0, &AbsolutizeOptions::default()).unwrap();
        let lambda = s.mu * (1.0 + 1e-4);
        let inside: Vec<usize> = dom.inside_nodes().collect();
        for _ in 0..40 {
            let x = inside[rng.gen_range(0..inside.len())];
            let d = metric.from_node(lambda, x);
            for _ in 0..10 {
                let y = inside[rng.gen_range(0..inside.len())];
                for u in [&s.s_minus, &s.s_plus, &abs.field] {
                    let rise = u.values[y] - u.values[x];
                    assert!(rise <= d.dist[y] + 1e-9, "{name}/{}: {rise} > d({x}, {y}) = {}", u.name, d.dist[y]);
                }
            }
        }
        for n in dom.inside_nodes() {
            let v = abs.field.values[n];
            assert!(s.s_minus.values[n] - 1e-9 <= v && v <= s.s_plus.values[n] + 1e-9, "{name}: envelope at {n}");
        }
    }
}

#[test]
fn absolutize_lowers_the_local_residual_on_two_arc() {
    let dom = GridDomain::build(Shape::unit_box(), 1.0 / 32.0, 16).unwrap();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| two_arc(p, TWO_ARC_BAND, TWO_ARC_DECAY));
    let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
    let radius = 4.0 * dom.h;
    let (before, _) = local_optimality_residual(&metric, &s.s_plus, radius, 2).unwrap();
    let v0 = ScalarField::midpoint(&s.s_minus, &s.s_plus, "u0");
    let abs = absolutize(&metric, &v0, &AbsolutizeOptions::default()).unwrap();
    assert!(abs.converged);
    let (after, _) = local_optimality_residual(&metric, &abs.field, radius, 2).unwrap();
    assert!(before > 0.01, "S^+ is not locally optimal: residual {before}");
    assert!(after < 0.5 * before, "residual {before} → {after}");
}

#[test]
fn one_dimensional_eikonal_is_exact() {
    let dom = GridDomain::build(Shape::unit_interval(), 1.0 / 64.0, 16).unwrap();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| p.x);
    let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
    assert!((s.mu - 1.0).abs() <= 1e-3, "μ = {}", s.mu);
    for n in dom.inside_nodes() {
        let x = dom.position(n).x;
        assert!((s.s_minus.values[n] - x).abs() <= dom.h);
        assert!((s.s_plus.values[n] - x).abs() <= dom.h);
    }
}
