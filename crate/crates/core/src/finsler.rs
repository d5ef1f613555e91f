//! Directed edge weights for `d_λ` and shortest-path transforms over the
//! stencil graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::domain::GridDomain;
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, ScaleProfile};

/// Marker for "no predecessor".
pub const NO_PRED: usize = usize::MAX;

/// Default number of trapezoid samples per edge.
pub const DEFAULT_N_QUAD: usize = 3;

/// Cached weight vectors kept per metric before the cache is flushed.
const CACHE_LIMIT: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `dist(x) = min_s c_s + d(s, x)`.
    Forward,
    /// `dist(x) = min_s c_s + d(x, s)`.
    Reverse,
}

#[derive(Debug, Clone, Default)]
pub struct DijkstraOptions {
    /// Labels above the cutoff are left unsettled (reported as `+∞`).
    pub cutoff: Option<f64>,
    /// Stop as soon as all of these nodes are settled.
    pub targets: Option<Vec<usize>>,
}

/// Labels and predecessor links of one transform.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub lambda: f64,
    pub direction: Direction,
    pub dist: Vec<f64>,
    /// Next node towards the seed that realises `dist`.
    pub pred: Vec<usize>,
}

impl DistanceField {
    /// Node sequence in travel order: seed → target for forward fields,
    /// target → seed for reverse fields.
    pub fn extract_geodesic(&self, target: usize) -> Result<Vec<usize>> {
        if target >= self.dist.len() || !self.dist[target].is_finite() {
            return Err(Error::Unreachable(target));
        }
        let mut path = vec![target];
        let mut cur = target;
        while self.pred[cur] != NO_PRED {
            cur = self.pred[cur];
            path.push(cur);
            if path.len() > self.dist.len() {
                unreachable!("predecessor links form a cycle");
            }
        }
        if self.direction == Direction::Forward {
            path.reverse();
        }
        Ok(path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed so that `BinaryHeap` pops the smallest (dist, node) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable buffers for repeated small transforms; only touched entries are
/// reset between runs.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
    settled: Vec<bool>,
    touched: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl Workspace {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n_nodes],
            pred: vec![NO_PRED; n_nodes],
            settled: vec![false; n_nodes],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &n in &self.touched {
            self.dist[n] = f64::INFINITY;
            self.pred[n] = NO_PRED;
            self.settled[n] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    pub fn is_settled(&self, node: usize) -> bool {
        self.settled[node]
    }
}

/// Multi-seed Dijkstra with a weight callback indexed by edge. Returns the
/// settled nodes in settle order; their labels are in `ws.dist`.
///
/// Ties are broken by the smaller node index, so the result is independent of
/// anything but the inputs.
pub fn dijkstra_with<W: Fn(usize) -> f64>(
    dom: &GridDomain,
    weight: W,
    seeds: &[(usize, f64)],
    direction: Direction,
    opts: &DijkstraOptions,
    ws: &mut Workspace,
) -> Vec<usize> {
    ws.reset();
    let adj = &dom.adjacency;
    for &(s, c) in seeds {
        debug_assert!(dom.inside[s], "seed {s} is outside the domain");
        if c < ws.dist[s] {
            if ws.dist[s] == f64::INFINITY {
                ws.touched.push(s);
            }
            ws.dist[s] = c;
            ws.heap.push(Entry { dist: c, node: s });
        }
    }
    let mut remaining = opts.targets.as_ref().map(|t| {
        let mut t = t.clone();
        t.sort_unstable();
        t.dedup();
        t
    });
    let mut order = Vec::new();
    while let Some(Entry { dist: d, node }) = ws.heap.pop() {
        if ws.settled[node] || d > ws.dist[node] {
            continue;
        }
        if opts.cutoff.is_some_and(|c| d > c) {
            break;
        }
        ws.settled[node] = true;
        order.push(node);
        if let Some(rem) = remaining.as_mut() {
            if let Ok(k) = rem.binary_search(&node) {
                rem.remove(k);
                if rem.is_empty() {
                    break;
                }
            }
        }
        for e in adj.edges_of(node) {
            let v = adj.targets[e];
            if ws.settled[v] {
                continue;
            }
            let w = match direction {
                Direction::Forward => weight(e),
                Direction::Reverse => weight(adj.reverse[e]),
            };
            let nd = d + w;
            if nd < ws.dist[v] {
                if ws.dist[v] == f64::INFINITY {
                    ws.touched.push(v);
                }
                ws.dist[v] = nd;
                ws.pred[v] = node;
                ws.heap.push(Entry { dist: nd, node: v });
            }
        }
    }
    order
}

/// Full-field transform over precomputed edge weights. Unsettled nodes are
/// reported as `+∞`.
pub fn dijkstra(
    dom: &GridDomain,
    weights: &[f64],
    seeds: &[(usize, f64)],
    direction: Direction,
    opts: &DijkstraOptions,
) -> DistanceField {
    transform_with(dom, |e| weights[e], seeds, direction, opts, f64::NAN)
}

fn transform_with<W: Fn(usize) -> f64>(
    dom: &GridDomain,
    weight: W,
    seeds: &[(usize, f64)],
    direction: Direction,
    opts: &DijkstraOptions,
    lambda: f64,
) -> DistanceField {
    let n = dom.n_nodes();
    let mut ws = Workspace::new(n);
    let order = dijkstra_with(dom, weight, seeds, direction, opts, &mut ws);
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    for node in order {
        dist[node] = ws.dist[node];
        pred[node] = ws.pred[node];
    }
    DistanceField {
        lambda,
        direction,
        dist,
        pred,
    }
}

/// `∫₀¹ L_λ(a + t(b−a), b−a) dt` by the trapezoid rule on `n_quad ≥ 2` samples.
pub fn edge_weight(spec: &HamiltonianSpec, dom: &GridDomain, a: usize, b: usize, lambda: f64, n_quad: usize) -> f64 {
    let (pa, pb) = (dom.position(a), dom.position(b));
    let q = pb - pa;
    if spec.is_homogeneous_in_space() {
        return spec.conjugate(pa, q, lambda);
    }
    let n = n_quad.max(2);
    let mut sum = 0.0;
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        sum += w * spec.conjugate(pa.lerp(pb, t), q, lambda);
    }
    sum / (n - 1) as f64
}

/// Sample count for an edge: doubled where the weight degenerates at `∂Ω`.
pub fn quadrature_points(spec: &HamiltonianSpec, dom: &GridDomain, a: usize, b: usize) -> usize {
    if spec.needs_boundary_refinement() {
        let len = (dom.position(b) - dom.position(a)).norm();
        let near = dom.shape.boundary_distance(dom.position(a)).min(dom.shape.boundary_distance(dom.position(b)));
        if near < 2.0 * len {
            return 2 * DEFAULT_N_QUAD;
        }
    }
    DEFAULT_N_QUAD
}

/// Edge weights at one level.
#[derive(Debug, Clone)]
pub enum EdgeWeights {
    /// `factor · base[e]`.
    Scaled(f64, Arc<Vec<f64>>),
    Table(Arc<Vec<f64>>),
}

impl EdgeWeights {
    #[inline]
    pub fn get(&self, edge: usize) -> f64 {
        match self {
            EdgeWeights::Scaled(f, base) => f * base[edge],
            EdgeWeights::Table(w) => w[edge],
        }
    }
}

/// `d_λ` on a fixed domain: edge weights memoised per `λ`.
#[derive(Debug)]
pub struct Metric<'a> {
    pub spec: &'a HamiltonianSpec,
    pub dom: &'a GridDomain,
    profile: Option<ScaleProfile>,
    base: Option<Arc<Vec<f64>>>,
    cache: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
}

impl<'a> Metric<'a> {
    pub fn new(spec: &'a HamiltonianSpec, dom: &'a GridDomain) -> Self {
        let profile = spec.scale_profile();
        let mut metric = Self {
            spec,
            dom,
            profile,
            base: None,
            cache: Mutex::new(HashMap::new()),
        };
        if let Some(p) = profile {
            metric.base = Some(Arc::new(metric.compute(p.level(1.0))));
        }
        metric
    }

    /// `d_λ = φ(λ)·d̂` when the Hamiltonian's sublevels are rescalings.
    pub fn scale_profile(&self) -> Option<ScaleProfile> {
        self.profile
    }

    fn compute(&self, lambda: f64) -> Vec<f64> {
        let adj = &self.dom.adjacency;
        (0..adj.n_edges())
            .into_par_iter()
            .map(|e| self.edge_weight_uncached(e, lambda))
            .collect()
    }

    /// Weight of edge `e` at `λ`, computed directly.
    pub fn edge_weight_uncached(&self, e: usize, lambda: f64) -> f64 {
        let adj = &self.dom.adjacency;
        let (a, b) = (adj.sources[e], adj.targets[e]);
        let n_quad = quadrature_points(self.spec, self.dom, a, b);
        edge_weight(self.spec, self.dom, a, b, lambda, n_quad)
    }

    /// Weights with `φ = 1` for separable kinds.
    pub fn unit_weights(&self) -> Option<EdgeWeights> {
        self.base.as_ref().map(|b| EdgeWeights::Scaled(1.0, Arc::clone(b)))
    }

    pub fn weights(&self, lambda: f64) -> EdgeWeights {
        if let (Some(p), Some(base)) = (self.profile, &self.base) {
            return EdgeWeights::Scaled(p.scale(lambda), Arc::clone(base));
        }
        let key = lambda.to_bits();
        if let Some(w) = self.cache.lock().expect("weight cache poisoned").get(&key) {
            return EdgeWeights::Table(Arc::clone(w));
        }
        let w = Arc::new(self.compute(lambda));
        let mut cache = self.cache.lock().expect("weight cache poisoned");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        // Values are pure functions of (edge, λ), so a racing insert is identical.
        let entry = cache.entry(key).or_insert(w);
        EdgeWeights::Table(Arc::clone(entry))
    }

    /// Boundary- or multi-seeded transform at `λ`.
    pub fn transform(&self, lambda: f64, seeds: &[(usize, f64)], direction: Direction, opts: &DijkstraOptions) -> DistanceField {
        let w = self.weights(lambda);
        transform_with(self.dom, |e| w.get(e), seeds, direction, opts, lambda)
    }

    /// `d_λ(x, ·)`.
    pub fn from_node(&self, lambda: f64, x: usize) -> DistanceField {
        self.transform(lambda, &[(x, 0.0)], Direction::Forward, &DijkstraOptions::default())
    }

    /// `d_λ(·, y)`.
    pub fn to_node(&self, lambda: f64, y: usize) -> DistanceField {
        self.transform(lambda, &[(y, 0.0)], Direction::Reverse, &DijkstraOptions::default())
    }

    /// `d_λ(x, y)`; `+∞` across components.
    pub fn pairwise_distance(&self, lambda: f64, x: usize, y: usize) -> Result<f64> {
        self.dom.check_inside(x)?;
        self.dom.check_inside(y)?;
        if self.dom.component[x] != self.dom.component[y] {
            return Ok(f64::INFINITY);
        }
        let opts = DijkstraOptions {
            targets: Some(vec![y]),
            ..Default::default()
        };
        Ok(self.transform(lambda, &[(x, 0.0)], Direction::Forward, &opts).dist[y])
    }

    /// Sum of `w_λ` along a node sequence given in travel order.
    pub fn path_cost(&self, lambda: f64, path: &[usize]) -> Result<f64> {
        let w = self.weights(lambda);
        let adj = &self.dom.adjacency;
        let mut total = 0.0;
        for pair in path.windows(2) {
            let e = adj
                .find(pair[0], pair[1])
                .ok_or_else(|| Error::Domain(format!("no edge {} → {}", pair[0], pair[1])))?;
            total += w.get(e);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Shape;
    use crate::geometry::Vec2;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_examples() {
        let dom = GridDomain::build(Shape::unit_box(), 0.1, 16).unwrap();
        let (a, b) = (dom.node(2, 5), dom.node(3, 5));
        let eik = HamiltonianSpec::eikonal();
        assert_relative_eq!(edge_weight(&eik, &dom, a, b, 2.0, 3), 0.2, epsilon = 1e-12);
        let plateau = HamiltonianSpec::plateau(0.5, 0.75).unwrap();
        assert_relative_eq!(edge_weight(&plateau, &dom, a, b, 0.5, 3), 0.075, epsilon = 1e-12);
    }

    #[test]
    fn weighted_edge_at_half_depth() {
        let dom = GridDomain::build(Shape::unit_box(), 0.1, 16).unwrap();
        let spec = HamiltonianSpec::weighted(
            crate::hamiltonian::WeightField::BoundaryDistance(Shape::unit_box()),
            Vec2::ZERO,
            Vec2::new(1.0, 1.0),
        )
        .unwrap();
        let (a, b) = (dom.node(4, 5), dom.node(5, 5));
        // Along y = 0.5 between x = 0.4 and 0.5 the weight is w = x; oracle is a
        // dense midpoint rule of λ·w·|q|.
        let n = 100_000;
        let dense: f64 = (0..n)
            .map(|k| {
                let p = dom.position(a).lerp(dom.position(b), (k as f64 + 0.5) / n as f64);
                dom.shape.boundary_distance(p) * 0.1
            })
            .sum::<f64>()
            / n as f64;
        let w = edge_weight(&spec, &dom, a, b, 1.0, 3);
        assert_relative_eq!(w, dense, epsilon = 1e-9);
        assert_relative_eq!(w, 0.045, epsilon = 1e-12);
    }

    #[test]
    fn zero_level_gives_minimum_label() {
        let dom = GridDomain::build(Shape::unit_box(), 0.25, 16).unwrap();
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let seeds = [(dom.node(0, 0), 3.0), (dom.node(4, 4), 1.5)];
        let f = metric.transform(0.0, &seeds, Direction::Forward, &DijkstraOptions::default());
        assert!(dom.inside_nodes().all(|n| f.dist[n] == 1.5));
    }

    #[test]
    fn geodesic_of_a_seed_is_a_single_node() {
        let dom = GridDomain::build(Shape::unit_box(), 0.25, 16).unwrap();
        let eik = HamiltonianSpec::eikonal();
        let metric = Metric::new(&eik, &dom);
        let x = dom.node(1, 2);
        let f = metric.from_node(1.0, x);
        assert_eq!(f.dist[x], 0.0);
        assert_eq!(f.extract_geodesic(x).unwrap(), vec![x]);
    }
}
