//! Local optimal values, attainment sets and chains on closed-form fields.

use supnorm::pointwise::{
    ascent_chain, attainment_set, default_radii, pointwise_h, verify_inclusion, ChainDirection, ChainOptions,
};
use supnorm::solver::{absolutize, solve_mu, AbsolutizeOptions, SolverOptions};
use supnorm::{GridDomain, HamiltonianSpec, Metric, ScalarField, Shape, Vec2};

const TOL: f64 = 1e-9;

fn unit_box(n: usize) -> GridDomain {
    GridDomain::build(Shape::unit_box(), 1.0 / n as f64, 16).unwrap()
}

#[test]
fn linear_field_has_constant_local_values() {
    let dom = unit_box(32);
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let u = ScalarField::from_fn(&dom, "u", |p| 0.7 * p.x + 0.2 * p.y);
    let exact = (0.7f64 * 0.7 + 0.2 * 0.2).sqrt();
    let pw = pointwise_h(&metric, &u, &default_radii(&dom), TOL).unwrap();
    assert!(pw.monotonicity_defect() <= 1e-6, "defect {}", pw.monotonicity_defect());
    for n in dom.interior_nodes() {
        let v = pw.h_du[n];
        assert!((v - exact).abs() <= 5.0 * dom.h, "h_du {v} at {:?}", dom.ij(n));
        for k in 0..pw.radii.len() {
            assert!(v <= pw.mu_of_r[k][n] + 1e-6);
        }
    }
}

#[test]
fn cone_apex_keeps_unit_slope() {
    let dom = unit_box(32);
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let c = Vec2::new(0.5, 0.5);
    let u = ScalarField::from_fn(&dom, "cone", |p| ((p.x - c.x).powi(2) + (p.y - c.y).powi(2)).sqrt());
    let pw = pointwise_h(&metric, &u, &default_radii(&dom), TOL).unwrap();
    let apex = dom.nearest_node(c).unwrap();
    assert!((pw.h_du[apex] - 1.0).abs() <= 0.05, "apex value {}", pw.h_du[apex]);
    assert!(pw.monotonicity_defect() <= 1e-6);
}

#[test]
fn tent_attains_everywhere_but_at_the_ridge() {
    let dom = GridDomain::build(Shape::unit_interval(), 1.0 / 64.0, 16).unwrap();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let u = ScalarField::from_fn(&dom, "tent", |p| 0.5 - (p.x - 0.5).abs());
    let radii = default_radii(&dom);
    let pw = pointwise_h(&metric, &u, &radii, TOL).unwrap();
    let set = attainment_set(&pw, 0.05);
    let r = *radii.last().unwrap();
    for n in dom.interior_nodes() {
        let x = dom.position(n).x;
        let from_ridge = (x - 0.5).abs();
        if from_ridge >= r - 1e-12 {
            assert!(set.binary_search(&n).is_ok(), "x = {x} missing, h_du = {}", pw.h_du[n]);
        }
        if from_ridge < 1e-12 {
            assert!(set.binary_search(&n).is_err(), "ridge x = {x} in the attainment set");
            // A symmetric ball around the ridge has equal endpoint data.
            assert!(pw.h_du[n].abs() <= 1e-6);
        }
    }
}

#[test]
fn chains_of_a_linear_field_run_along_its_gradient() {
    let dom = unit_box(32);
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let u = ScalarField::from_fn(&dom, "u", |p| p.x);
    let seed = dom.node(16, 16);
    let opts = ChainOptions::default();
    let up = ascent_chain(&metric, &u, seed, 1.0, ChainDirection::Up, &opts).unwrap();
    let down = ascent_chain(&metric, &u, seed, 1.0, ChainDirection::Down, &opts).unwrap();
    let (pu, pd) = (dom.position(up.end()), dom.position(down.end()));
    assert!((pu.x - 1.0).abs() < 1e-12 && (pu.y - 0.5).abs() <= 2.0 * dom.h, "up ends at {pu:?}");
    assert!(pd.x.abs() < 1e-12 && (pd.y - 0.5).abs() <= 2.0 * dom.h, "down ends at {pd:?}");
    assert!(up.max_slope_defect() <= 1e-9 && down.max_slope_defect() <= 1e-9);
    assert!((up.total_cost() - 0.5).abs() <= 1e-9 && (down.total_cost() - 0.5).abs() <= 1e-9);
    for w in up.nodes.windows(2) {
        assert!(dom.position(w[1]).x > dom.position(w[0]).x);
    }
}

#[test]
fn one_dimensional_minimizers_share_their_attainment_set() {
    let dom = GridDomain::build(Shape::unit_interval(), 1.0 / 64.0, 16).unwrap();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let g = ScalarField::from_fn(&dom, "g", |p| p.x);
    let s = solve_mu(&metric, &g, &SolverOptions::default()).unwrap();
    let v0 = ScalarField::midpoint(&s.s_minus, &s.s_plus, "u0");
    let abs = absolutize(&metric, &v0, &AbsolutizeOptions::default()).unwrap();
    let radii = default_radii(&dom);
    let pw = pointwise_h(&metric, &abs.field, &radii, TOL).unwrap();
    let others = vec![
        ("s_minus".to_string(), pointwise_h(&metric, &s.s_minus, &radii, TOL).unwrap()),
        ("s_plus".to_string(), pointwise_h(&metric, &s.s_plus, &radii, TOL).unwrap()),
    ];
    let report = verify_inclusion(&metric, &abs.field, &pw, &others, 0.05, 0.1, s.mu, &[], &ChainOptions::default()).unwrap();
    assert_eq!(report.set.len(), dom.interior_nodes().count());
    for v in &report.inclusion_verdicts {
        assert_eq!((v.fraction, v.reverse_fraction), (1.0, 1.0), "{}", v.name);
    }
    let chain = &report.chains[0];
    let ends = [dom.position(chain.down.end()).x, dom.position(chain.up.end()).x];
    assert_eq!(ends, [0.0, 1.0]);
    assert!((chain.chain_cost - chain.endpoint_distance).abs() <= 1e-6);
}
