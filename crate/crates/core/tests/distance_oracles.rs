//! Graph distances against brute force, closed forms and metric axioms.

use std::sync::OnceLock;

use proptest::prelude::*;
use supnorm::finsler::{DijkstraOptions, Direction};
use supnorm::{GridDomain, HamiltonianSpec, Metric, Shape, Vec2};

fn euclid(dom: &GridDomain, a: usize, b: usize) -> f64 {
    let (p, q) = (dom.position(a), dom.position(b));
    ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()
}

/// Shortest simple-path cost from `src` to every node by exhaustive search.
fn brute_force(dom: &GridDomain, src: usize) -> Vec<f64> {
    fn dfs(dom: &GridDomain, at: usize, cost: f64, seen: &mut Vec<bool>, best: &mut Vec<f64>) {
        best[at] = best[at].min(cost);
        for e in dom.adjacency.edges_of(at) {
            let next = dom.adjacency.targets[e];
            if !seen[next] {
                seen[next] = true;
                dfs(dom, next, cost + euclid(dom, at, next), seen, best);
                seen[next] = false;
            }
        }
    }
    let mut best = vec![f64::INFINITY; dom.n_nodes()];
    let mut seen = vec![false; dom.n_nodes()];
    seen[src] = true;
    dfs(dom, src, 0.0, &mut seen, &mut best);
    best
}

#[test]
fn three_by_three_matches_exhaustive_search() {
    let dom = GridDomain::build(
        Shape::Box {
            lo: Vec2::ZERO,
            hi: Vec2::new(2.0, 2.0),
        },
        1.0,
        16,
    )
    .unwrap();
    assert_eq!(dom.n_nodes(), 9);
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    for src in 0..9 {
        let oracle = brute_force(&dom, src);
        let d = metric.from_node(1.0, src);
        for n in 0..9 {
            assert!((d.dist[n] - oracle[n]).abs() <= 1e-12, "{src} → {n}: {} vs {}", d.dist[n], oracle[n]);
        }
    }
    let corner = metric.pairwise_distance(1.0, dom.node(0, 0), dom.node(2, 2)).unwrap();
    assert!((corner - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn box_distances_track_euclidean_length() {
    let dom = GridDomain::build(Shape::unit_box(), 0.05, 16).unwrap();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, &dom);
    let (a, b) = (dom.node(0, 0), dom.node(20, 20));
    let d = metric.pairwise_distance(1.0, a, b).unwrap();
    assert!((d / 2f64.sqrt() - 1.0).abs() <= 0.03, "diagonal {d}");

    // Off-stencil direction: slope 7/20.
    let c = dom.node(20, 7);
    let d = metric.pairwise_distance(1.0, a, c).unwrap();
    let exact = euclid(&dom, a, c);
    assert!(d >= exact - 1e-12 && d <= 1.03 * exact, "{d} vs {exact}");

    // L_λ = λ|q| for the eikonal Hamiltonian.
    let d = metric.pairwise_distance(3.0, dom.node(0, 10), dom.node(20, 10)).unwrap();
    assert!((d - 3.0).abs() <= 0.03, "horizontal at λ = 3: {d}");
}

#[test]
fn extracted_geodesics_replay_their_cost() {
    let dom = GridDomain::build(Shape::unit_box(), 0.05, 16).unwrap();
    let spec = HamiltonianSpec::anisotropic([[4.0, 1.0], [1.0, 2.0]]).unwrap();
    let metric = Metric::new(&spec, &dom);
    let src = dom.node(3, 4);
    let forward = metric.from_node(1.5, src);
    let reverse = metric.to_node(1.5, src);
    for target in [dom.node(17, 19), dom.node(0, 20), dom.node(20, 1), dom.node(9, 4)] {
        let path = forward.extract_geodesic(target).unwrap();
        assert_eq!((path[0], *path.last().unwrap()), (src, target));
        let cost = metric.path_cost(1.5, &path).unwrap();
        assert!((cost - forward.dist[target]).abs() <= 1e-12 * (1.0 + cost));

        let path = reverse.extract_geodesic(target).unwrap();
        assert_eq!((path[0], *path.last().unwrap()), (target, src));
        let cost = metric.path_cost(1.5, &path).unwrap();
        assert!((cost - reverse.dist[target]).abs() <= 1e-12 * (1.0 + cost));
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Proper or touching intersection of closed segments.
fn crosses(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 <= 0.0 && o3 * o4 <= 0.0 && !(o1 == 0.0 && o2 == 0.0)
}

fn slit_domain() -> &'static GridDomain {
    static DOM: OnceLock<GridDomain> = OnceLock::new();
    DOM.get_or_init(|| GridDomain::build(Shape::slit_annulus(), 0.05, 16).unwrap())
}

#[test]
fn no_edge_crosses_the_slit() {
    let dom = slit_domain();
    let (c, d) = (Vec2::new(0.0, -2.0), Vec2::new(0.0, -1.0));
    let adj = &dom.adjacency;
    for e in 0..adj.n_edges() {
        let (a, b) = (dom.position(adj.sources[e]), dom.position(adj.targets[e]));
        assert!(!crosses(a, b, c, d), "edge {a:?} → {b:?} crosses the slit");
    }
}

#[test]
fn slit_forces_a_detour_around_the_hole() {
    let dom = slit_domain();
    let spec = HamiltonianSpec::eikonal();
    let metric = Metric::new(&spec, dom);
    let right = dom.nearest_node(Vec2::new(0.05, -1.5)).unwrap();
    let left = dom.nearest_node(Vec2::new(-0.05, -1.5)).unwrap();
    let (p, q) = (dom.position(right), dom.position(left));
    assert!(p.x > 0.0 && q.x < 0.0);

    // Both points see the inner unit circle; the shortest path runs the long
    // way round: tangent, arc, tangent.
    let (r1, r2) = (p.norm(), q.norm());
    let (t1, mut t2) = (p.y.atan2(p.x), q.y.atan2(q.x));
    if t2 < t1 {
        t2 += std::f64::consts::TAU;
    }
    let sweep = t2 - t1;
    let exact = (r1 * r1 - 1.0).sqrt() + (r2 * r2 - 1.0).sqrt() + (sweep - (1.0 / r1).acos() - (1.0 / r2).acos());
    let d = metric.pairwise_distance(1.0, right, left).unwrap();
    assert!(d >= exact * (1.0 - 1e-9) && d <= 1.04 * exact, "detour {d} vs {exact}");
    assert!(d > 10.0 * euclid(dom, right, left));
}

fn even_kinds() -> &'static [(&'static str, HamiltonianSpec)] {
    static KINDS: OnceLock<Vec<(&'static str, HamiltonianSpec)>> = OnceLock::new();
    KINDS.get_or_init(|| {
        vec![
            ("eikonal", HamiltonianSpec::eikonal()),
            ("anisotropic", HamiltonianSpec::anisotropic([[3.0, -1.0], [-1.0, 1.0]]).unwrap()),
            ("power-2", HamiltonianSpec::isotropic_power(2.0).unwrap()),
        ]
    })
}

fn small_box() -> &'static GridDomain {
    static DOM: OnceLock<GridDomain> = OnceLock::new();
    DOM.get_or_init(|| GridDomain::build(Shape::unit_box(), 1.0 / 12.0, 16).unwrap())
}

fn node() -> impl Strategy<Value = usize> {
    let n = small_box().n_nodes();
    0..n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangle_inequality(x in node(), y in node(), z in node(), lambda in 0.2..3.0f64) {
        let dom = small_box();
        for (name, spec) in even_kinds() {
            let metric = Metric::new(spec, dom);
            let from_x = metric.from_node(lambda, x);
            let from_y = metric.from_node(lambda, y);
            let (xz, xy, yz) = (from_x.dist[z], from_x.dist[y], from_y.dist[z]);
            prop_assert!(xz <= xy + yz + 1e-12 * (1.0 + xz), "{name}: {xz} > {xy} + {yz}");
        }
    }

    #[test]
    fn symmetric_for_even_hamiltonians(x in node(), lambda in 0.2..3.0f64) {
        let dom = small_box();
        for (name, spec) in even_kinds() {
            let metric = Metric::new(spec, dom);
            let fwd = metric.from_node(lambda, x);
            let rev = metric.transform(lambda, &[(x, 0.0)], Direction::Reverse, &DijkstraOptions::default());
            for n in 0..dom.n_nodes() {
                let (a, b) = (fwd.dist[n], rev.dist[n]);
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a), "{name}: d(x, {n}) = {a}, d({n}, x) = {b}");
            }
        }
    }
}
